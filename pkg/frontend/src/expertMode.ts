const STORAGE_KEY = "shexgen.expertMode";

type Listener = (enabled: boolean) => void;

const listeners = new Set<Listener>();

export function expertModeEnabled(): boolean {
  try {
    return window.localStorage.getItem(STORAGE_KEY) === "true";
  } catch {
    return false;
  }
}

export function setExpertMode(enabled: boolean): void {
  try {
    window.localStorage.setItem(STORAGE_KEY, String(enabled));
  } catch {
    // storage unavailable; the toggle still works for this page
  }
  for (const listener of listeners) {
    listener(enabled);
  }
}

export function onExpertModeChange(listener: Listener): () => void {
  listeners.add(listener);
  return () => listeners.delete(listener);
}
