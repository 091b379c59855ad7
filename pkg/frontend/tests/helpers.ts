import { readFileSync } from "node:fs";

export function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function fixtureText(name: string): string {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return readFileSync(url, "utf-8");
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

// crude but adequate: pull attribute values out of rendered fragments
export function attrValues(html: string, attr: string): string[] {
  const out: string[] = [];
  const re = new RegExp(`${attr}="([^"]*)"`, "g");
  for (const match of html.matchAll(re)) {
    out.push(match[1] as string);
  }
  return out;
}

export function attrFor(html: string, marker: string, attr: string): string | null {
  const re = new RegExp(`${marker}[^>]*${attr}="([^"]*)"`);
  const m = html.match(re);
  if (m) return m[1] as string;
  const reFlipped = new RegExp(`${attr}="([^"]*)"[^>]*${marker}`);
  const m2 = html.match(reFlipped);
  return m2 ? (m2[1] as string) : null;
}
