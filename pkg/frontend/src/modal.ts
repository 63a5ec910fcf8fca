export interface FieldSpec {
  name: string;
  label: string;
  multiline?: boolean;
  value?: string;
}

export interface ModalSpec {
  title: string;
  fields: FieldSpec[];
  submitLabel: string;
  onSubmit: (values: Record<string, string>) => Promise<void>;
}

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

/** Open a form modal; resolves when submitted or aborted. */
export function openModal(spec: ModalSpec): void {
  const backdrop = el("div", "modal-backdrop");
  const dialog = el("div", "modal");
  dialog.setAttribute("role", "dialog");
  dialog.appendChild(el("h2", "modal-title", spec.title));

  const inputs = new Map<string, HTMLInputElement | HTMLTextAreaElement>();
  for (const field of spec.fields) {
    const row = el("label", "modal-field");
    row.appendChild(el("span", undefined, field.label));
    const input = field.multiline ? el("textarea") : el("input");
    input.name = field.name;
    input.value = field.value ?? "";
    if (input instanceof HTMLTextAreaElement) {
      input.rows = 10;
      input.spellcheck = false;
    }
    inputs.set(field.name, input);
    row.appendChild(input);
    dialog.appendChild(row);
  }

  const error = el("p", "modal-error");
  error.hidden = true;
  dialog.appendChild(error);

  const actions = el("div", "modal-actions");
  const abort = el("button", "button", "Abort");
  abort.type = "button";
  const submit = el("button", "button primary", spec.submitLabel);
  submit.type = "button";
  actions.append(abort, submit);
  dialog.appendChild(actions);

  const close = () => backdrop.remove();
  abort.addEventListener("click", close);
  backdrop.addEventListener("click", (event) => {
    if (event.target === backdrop) close();
  });
  submit.addEventListener("click", async () => {
    const values: Record<string, string> = {};
    for (const [name, input] of inputs) {
      values[name] = input.value;
    }
    submit.disabled = true;
    try {
      await spec.onSubmit(values);
      close();
    } catch (failure) {
      error.textContent = failure instanceof Error ? failure.message : String(failure);
      error.hidden = false;
      submit.disabled = false;
    }
  });

  backdrop.appendChild(dialog);
  document.body.appendChild(backdrop);
}

/** Confirmation dialog for destructive actions; Delete is the red action. */
export function confirmAction(message: string, onConfirm: () => Promise<void>): void {
  const backdrop = el("div", "modal-backdrop");
  const dialog = el("div", "modal");
  dialog.setAttribute("role", "dialog");
  dialog.appendChild(el("p", "modal-message", message));
  const actions = el("div", "modal-actions");
  const cancel = el("button", "button", "Cancel");
  cancel.type = "button";
  const confirm = el("button", "button danger confirm-delete", "Delete");
  confirm.type = "button";
  actions.append(cancel, confirm);
  dialog.appendChild(actions);
  cancel.addEventListener("click", () => backdrop.remove());
  confirm.addEventListener("click", async () => {
    confirm.disabled = true;
    try {
      await onConfirm();
    } finally {
      backdrop.remove();
    }
  });
  backdrop.appendChild(dialog);
  document.body.appendChild(backdrop);
}
