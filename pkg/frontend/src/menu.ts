import { api } from "./api.js";
import { confirmAction, openModal } from "./modal.js";
import type { SupplyChain } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Landing page: list of supply chains with create/edit/delete/open. */
export function renderMenu(root: HTMLElement, navigate: (path: string) => void): void {
  root.textContent = "";
  const appBar = el("header", "app-bar");
  appBar.appendChild(el("h1", "app-title", "Supply Chain Modeler"));
  root.appendChild(appBar);

  const layout = el("div", "layout");
  const drawer = el("aside", "drawer");
  drawer.appendChild(el("h2", "drawer-heading", "Supply Chains"));
  const list = el("div", "chain-list");
  drawer.appendChild(list);

  const drawerActions = el("div", "drawer-actions");
  const createButton = el("button", "button primary", "New supply chain");
  createButton.setAttribute("data-action", "create-chain");
  const refreshButton = el("button", "button", "Refresh");
  refreshButton.setAttribute("data-action", "refresh-chains");
  drawerActions.append(createButton, refreshButton);
  drawer.appendChild(drawerActions);
  layout.appendChild(drawer);

  const mainArea = el("main", "workspace menu-hint");
  mainArea.appendChild(
    el("p", "hint-text", "Select a supply chain on the left, or create a new one to get started."),
  );
  layout.appendChild(mainArea);
  root.appendChild(layout);

  const banner = el("div", "error-banner");
  banner.hidden = true;
  root.appendChild(banner);

  const showFailure = (message: string) => {
    banner.textContent = "";
    banner.append(el("span", undefined, message));
    const retry = el("button", "button", "Retry");
    retry.addEventListener("click", () => void load());
    banner.appendChild(retry);
    banner.hidden = false;
  };

  const renderList = (chains: SupplyChain[]) => {
    list.textContent = "";
    if (chains.length === 0) {
      list.appendChild(el("p", "empty-hint", "No supply chains yet."));
      return;
    }
    for (const chain of chains) {
      const card = el("div", "card chain-card");
      card.setAttribute("data-chain-id", String(chain.id));
      card.appendChild(el("h3", "card-title", chain.label));
      card.appendChild(el("p", "card-description", chain.description));
      const actions = el("div", "card-actions");
      const open = el("button", "button primary", "Open");
      open.setAttribute("data-action", "open-chain");
      open.addEventListener("click", () => navigate(`/supply-chain/${chain.id}`));
      const edit = el("button", "button", "Edit");
      edit.addEventListener("click", () =>
        openModal({
          title: "Edit supply chain",
          submitLabel: "Save",
          fields: [
            { name: "label", label: "Label", value: chain.label },
            { name: "description", label: "Description", value: chain.description },
          ],
          onSubmit: async (values) => {
            await api.updateChain(chain.id, values.label, values.description);
            await load();
          },
        }),
      );
      const remove = el("button", "button danger", "Delete");
      remove.setAttribute("data-action", "delete-chain");
      remove.addEventListener("click", () =>
        confirmAction(`Delete supply chain "${chain.label}"?`, async () => {
          await api.deleteChain(chain.id);
          await load();
        }),
      );
      actions.append(open, edit, remove);
      card.appendChild(actions);
      list.appendChild(card);
    }
  };

  const load = async () => {
    banner.hidden = true;
    try {
      renderList(await api.listChains());
    } catch (failure) {
      showFailure(failure instanceof Error ? failure.message : "Service unreachable");
    }
  };

  createButton.addEventListener("click", () =>
    openModal({
      title: "New supply chain",
      submitLabel: "Create",
      fields: [
        { name: "label", label: "Label" },
        { name: "description", label: "Description" },
      ],
      onSubmit: async (values) => {
        await api.createChain(values.label, values.description);
        await load();
      },
    }),
  );
  refreshButton.addEventListener("click", () => void load());

  void load();
}
