/** File download with a swappable handler so tests can capture exports. */

export type DownloadFn = (filename: string, text: string) => void;

let handler: DownloadFn = (filename, text) => {
  const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
};

export function download(filename: string, text: string): void {
  handler(filename, text);
}

export function setDownloadHandler(fn: DownloadFn): void {
  handler = fn;
}
