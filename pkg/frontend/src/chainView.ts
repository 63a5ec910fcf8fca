import { api, ApiError } from "./api.js";
import { Canvas } from "./canvas.js";
import { downloadText } from "./download.js";
import { expertModeEnabled, onExpertModeChange, setExpertMode } from "./expertMode.js";
import { confirmAction, openModal } from "./modal.js";
import type { SupplyChain, Template } from "./types.js";

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

export function renderErrorPage(root: HTMLElement, navigate: (path: string) => void, message: string): void {
  root.textContent = "";
  const page = el("main", "error-page");
  page.appendChild(el("h1", undefined, "Something went wrong"));
  page.appendChild(el("p", "error-message", message));
  const back = el("button", "button primary", "Back to menu");
  back.addEventListener("click", () => navigate("/"));
  page.appendChild(back);
  root.appendChild(page);
}

/** Chain workspace: template drawer, interactive canvas, app-bar actions. */
export async function renderChainView(
  root: HTMLElement,
  chainId: number,
  navigate: (path: string) => void,
): Promise<void> {
  let chain: SupplyChain;
  try {
    chain = await api.getChain(chainId);
  } catch (failure) {
    const message =
      failure instanceof ApiError && failure.status === 404
        ? `Supply chain ${chainId} does not exist.`
        : failure instanceof Error
          ? failure.message
          : "Service unreachable";
    renderErrorPage(root, navigate, message);
    return;
  }

  root.textContent = "";
  const appBar = el("header", "app-bar chain-app-bar");
  const back = el("button", "button back-button", "‹ Menu");
  back.addEventListener("click", () => navigate("/"));
  appBar.appendChild(back);
  appBar.appendChild(el("h1", "app-title", chain.label));

  const actions = el("div", "app-bar-actions");
  const expertLabel = el("label", "expert-toggle");
  const expertCheckbox = el("input");
  expertCheckbox.type = "checkbox";
  expertCheckbox.checked = expertModeEnabled();
  expertCheckbox.setAttribute("data-action", "toggle-expert");
  expertCheckbox.addEventListener("change", () => setExpertMode(expertCheckbox.checked));
  expertLabel.append(expertCheckbox, el("span", undefined, "Expert mode"));
  const generateButton = el("button", "button primary", "Generate graph");
  generateButton.setAttribute("data-action", "generate");
  actions.append(expertLabel, generateButton);
  appBar.appendChild(actions);
  root.appendChild(appBar);

  const layout = el("div", "layout");
  const drawer = el("aside", "drawer");
  const drawerToggle = el("button", "button drawer-toggle", "⟨");
  drawerToggle.setAttribute("data-action", "toggle-drawer");
  drawerToggle.addEventListener("click", () => {
    drawer.classList.toggle("collapsed");
    drawerToggle.textContent = drawer.classList.contains("collapsed") ? "⟩" : "⟨";
  });
  drawer.appendChild(drawerToggle);
  drawer.appendChild(el("h2", "drawer-heading", "Templates"));
  const templateList = el("div", "template-list");
  drawer.appendChild(templateList);

  const drawerActions = el("div", "drawer-actions");
  const newTemplateButton = el("button", "button primary expert-only", "New template");
  newTemplateButton.setAttribute("data-action", "create-template");
  const refreshButton = el("button", "button", "Refresh");
  refreshButton.setAttribute("data-action", "refresh-templates");
  drawerActions.append(newTemplateButton, refreshButton);
  drawer.appendChild(drawerActions);
  layout.appendChild(drawer);

  const workspace = el("main", "workspace");
  const canvasHost = el("div", "canvas-host");
  workspace.appendChild(canvasHost);
  const layoutButton = el("button", "button layout-button", "Auto layout");
  layoutButton.setAttribute("data-action", "auto-layout");
  workspace.appendChild(layoutButton);
  layout.appendChild(workspace);
  root.appendChild(layout);

  const banner = el("div", "error-banner");
  banner.hidden = true;
  root.appendChild(banner);
  const complain = (failure: unknown) => {
    banner.textContent = failure instanceof Error ? failure.message : String(failure);
    banner.hidden = false;
    setTimeout(() => {
      banner.hidden = true;
    }, 4000);
  };

  // The server is the source of truth: every mutation refetches the chain
  // before anything is rendered.
  const reloadChain = async () => {
    chain = await api.getChain(chainId);
    canvas.setData(chain.template_instances, chain.edges);
  };

  const canvas = new Canvas(canvasHost, {
    onConnect: async (sourceIoId, targetIoId) => {
      try {
        await api.addEdge(chainId, sourceIoId, targetIoId);
        await reloadChain();
      } catch (failure) {
        complain(failure);
      }
    },
    onDeleteInstance: async (id) => {
      try {
        await api.deleteInstance(id);
        await reloadChain();
      } catch (failure) {
        complain(failure);
      }
    },
    onDeleteEdge: async (id) => {
      try {
        await api.deleteEdge(id);
        await reloadChain();
      } catch (failure) {
        complain(failure);
      }
    },
  });
  canvas.setData(chain.template_instances, chain.edges);
  canvas.autoLayout();

  layoutButton.addEventListener("click", () => canvas.autoLayout());

  generateButton.addEventListener("click", async () => {
    try {
      const turtle = await api.chainGraph(chainId);
      downloadText(`supply-chain-${chainId}.ttl`, turtle);
    } catch (failure) {
      complain(failure);
    }
  });

  const templateModal = (title: string, submit: string, template: Template | null) =>
    openModal({
      title,
      submitLabel: submit,
      fields: [
        { name: "label", label: "Label", value: template?.label },
        { name: "description", label: "Description", value: template?.description },
        { name: "raw_shex", label: "Template definition", multiline: true, value: template?.raw_shex },
      ],
      onSubmit: async (values) => {
        if (template) {
          await api.updateTemplate(template.id, values.label, values.description, values.raw_shex);
        } else {
          await api.createTemplate(values.label, values.description, values.raw_shex);
        }
        await loadTemplates();
      },
    });

  const renderTemplates = (templates: Template[]) => {
    const expert = expertModeEnabled();
    templateList.textContent = "";
    if (templates.length === 0) {
      templateList.appendChild(el("p", "empty-hint", "No templates yet."));
    }
    for (const template of templates) {
      const card = el("div", "card template-card");
      card.setAttribute("data-template-id", String(template.id));
      card.appendChild(el("h3", "card-title", template.label));
      if (template.description) {
        card.appendChild(el("p", "card-description", template.description));
      }
      for (const warning of template.warnings) {
        card.appendChild(el("p", "card-warning", warning));
      }
      const cardActions = el("div", "card-actions");
      const add = el("button", "button primary", "Add");
      add.setAttribute("data-action", "add-instance");
      add.addEventListener("click", async () => {
        try {
          await api.instantiate(template.id, chainId);
          await reloadChain();
        } catch (failure) {
          complain(failure);
        }
      });
      const edit = el("button", "button expert-only", "Edit");
      edit.disabled = !expert;
      edit.addEventListener("click", () => templateModal("Edit template", "Save", template));
      const remove = el("button", "button danger expert-only", "Delete");
      remove.setAttribute("data-action", "delete-template");
      remove.disabled = !expert;
      remove.addEventListener("click", () =>
        confirmAction(`Delete template "${template.label}"?`, async () => {
          await api.deleteTemplate(template.id);
          await loadTemplates();
        }),
      );
      cardActions.append(add, edit, remove);
      card.appendChild(cardActions);
      templateList.appendChild(card);
    }
  };

  let templates: Template[] = [];
  const loadTemplates = async () => {
    try {
      templates = await api.listTemplates();
      renderTemplates(templates);
    } catch (failure) {
      complain(failure);
    }
  };

  newTemplateButton.disabled = !expertModeEnabled();
  newTemplateButton.addEventListener("click", () => templateModal("New template", "Create", null));
  refreshButton.addEventListener("click", () => void loadTemplates());
  const unsubscribe = onExpertModeChange(() => {
    if (!newTemplateButton.isConnected) {
      unsubscribe();
      return;
    }
    newTemplateButton.disabled = !expertModeEnabled();
    renderTemplates(templates);
  });

  await loadTemplates();
}
