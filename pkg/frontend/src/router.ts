export type Route =
  | { view: "menu" }
  | { view: "chain"; id: number }
  | { view: "unknown"; path: string };

export function parseRoute(pathname: string): Route {
  if (pathname === "/" || pathname === "") {
    return { view: "menu" };
  }
  const match = pathname.match(/^\/supply-chain\/(\d+)$/);
  if (match) {
    return { view: "chain", id: Number(match[1]) };
  }
  return { view: "unknown", path: pathname };
}
