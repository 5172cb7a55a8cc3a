/** Client-side attack-tree preview. The mermaid renderer is loaded lazily;
 * any failure (module missing, parse error) falls back to the raw code,
 * which is always displayed anyway. */

export interface PreviewResult {
  svg: string | null;
  fallback: boolean;
}

type Renderer = (id: string, source: string) => Promise<{ svg: string }>;

let renderer: Renderer | null | undefined;

async function loadRenderer(): Promise<Renderer | null> {
  if (renderer !== undefined) return renderer;
  try {
    const mermaid = (await import('mermaid')).default;
    mermaid.initialize({ startOnLoad: false, securityLevel: 'strict' });
    renderer = (id, source) => mermaid.render(id, source);
  } catch {
    renderer = null;
  }
  return renderer;
}

let counter = 0;

export async function renderPreview(
  source: string,
  load: () => Promise<Renderer | null> = loadRenderer,
): Promise<PreviewResult> {
  const render = await load();
  if (!render) return { svg: null, fallback: true };
  try {
    const { svg } = await render(`attack-tree-${counter++}`, source);
    return { svg, fallback: false };
  } catch {
    return { svg: null, fallback: true };
  }
}
