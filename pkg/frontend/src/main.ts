import { renderChainView, renderErrorPage } from "./chainView.js";
import { renderMenu } from "./menu.js";
import { parseRoute } from "./router.js";

export interface AppHandle {
  dispose(): void;
  navigate(path: string): void;
}

/** Boot the application into the given element; routing follows the URL. */
export function mountApp(root: HTMLElement): AppHandle {
  let disposed = false;

  const render = () => {
    if (disposed) return;
    const route = parseRoute(window.location.pathname);
    if (route.view === "menu") {
      renderMenu(root, navigate);
    } else if (route.view === "chain") {
      void renderChainView(root, route.id, navigate);
    } else {
      renderErrorPage(root, navigate, `Unknown page: ${route.path}`);
    }
  };

  const navigate = (path: string) => {
    window.history.pushState(null, "", path);
    render();
  };

  const onPopState = () => render();
  window.addEventListener("popstate", onPopState);
  render();

  return {
    navigate,
    dispose() {
      disposed = true;
      window.removeEventListener("popstate", onPopState);
      root.textContent = "";
    },
  };
}
