export type DownloadSink = (filename: string, content: string) => void;

let sink: DownloadSink | null = null;

/** Tests install a sink to capture downloads instead of touching the DOM. */
export function setDownloadSink(custom: DownloadSink | null): void {
  sink = custom;
}

export function downloadText(filename: string, content: string): void {
  if (sink) {
    sink(filename, content);
    return;
  }
  const blob = new Blob([content], { type: "text/turtle" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
