/**
 * Citation-graph explorer: pick a CreativeWork, drive GET closure with a
 * depth slider and an inbound/outbound toggle, and render the result as an
 * interactive SVG graph. Clicking a node loads its record in the editor.
 */

import type { ApiClient } from "./api.js";
import { clear, el, option, q } from "./dom.js";
import {
  FRAME_HEIGHT,
  FRAME_WIDTH,
  NODE_CAP,
  SVG_NS,
  buildGraphModel,
  layoutGraph,
  renderGraph,
  type GraphModel,
} from "./graph.js";
import type { TaskQueue } from "./tasks.js";
import type { EdgeDoc } from "./types.js";

export interface ExplorerCallbacks {
  /** Receives the FDO record PID of a clicked node. */
  onSelect?: (fdoPid: string) => void;
}

export class ExplorerView {
  readonly element: HTMLElement;
  private readonly rootSelect: HTMLSelectElement;
  private readonly depthSlider: HTMLInputElement;
  private readonly depthLabel: HTMLElement;
  private readonly svg: SVGSVGElement;
  private readonly banner: HTMLElement;
  private readonly status: HTMLElement;
  /** metadata PID → FDO record PID, labels; rebuilt from the catalog. */
  private works = new Map<string, { fdoPid: string; name: string }>();
  private model: GraphModel | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly queue: TaskQueue,
    private readonly callbacks: ExplorerCallbacks = {},
  ) {
    this.element = el("div", { class: "explorer-view" });
    this.element.innerHTML = `
      <div class="toolbar">
        <label>Root work
          <select class="explorer-root"><option value="">— pick a CreativeWork —</option></select>
        </label>
        <label>Depth
          <input type="range" class="explorer-depth" min="1" max="10" value="10">
          <span class="explorer-depth-label">10</span>
        </label>
        <label class="toolbar-check">
          <input type="radio" name="explorer-direction" value="outbound" checked> cites
        </label>
        <label class="toolbar-check">
          <input type="radio" name="explorer-direction" value="inbound"> cited by
        </label>
        <button type="button" class="explorer-render">Render graph</button>
      </div>
      <div class="truncation-banner" hidden>
        Showing the first ${NODE_CAP} nodes only; the closure is larger.
      </div>
      <div class="explorer-status" role="status"></div>
      <svg class="explorer-graph" viewBox="0 0 ${FRAME_WIDTH} ${FRAME_HEIGHT}"
           xmlns="${SVG_NS}"></svg>
    `;
    this.rootSelect = q(this.element, ".explorer-root");
    this.depthSlider = q(this.element, ".explorer-depth");
    this.depthLabel = q(this.element, ".explorer-depth-label");
    this.banner = q(this.element, ".truncation-banner");
    this.status = q(this.element, ".explorer-status");
    this.svg = q<SVGSVGElement>(this.element, "svg.explorer-graph");

    this.depthSlider.addEventListener("input", () => {
      this.depthLabel.textContent = this.depthSlider.value;
    });
    q<HTMLButtonElement>(this.element, ".explorer-render").addEventListener("click", () => {
      void this.render();
    });
  }

  /** Refresh the root picker from the catalog's CreativeWorks. */
  refreshRoots(): Promise<void> {
    return this.queue.run(async () => {
      try {
        const page = await this.client.listFdos({ classFilter: "CreativeWork", limit: 500 });
        this.works = new Map(
          page.items.map((record) => {
            const name = record.metadata["name"];
            return [
              record.metadata_pid,
              {
                fdoPid: record.pid,
                name: typeof name === "string" ? name : record.metadata_pid,
              },
            ];
          }),
        );
        const previous = this.rootSelect.value;
        clear(this.rootSelect);
        this.rootSelect.append(option("", "— pick a CreativeWork —"));
        for (const [metadataPid, info] of this.works) {
          this.rootSelect.append(option(metadataPid, info.name));
        }
        if (this.works.has(previous)) this.rootSelect.value = previous;
      } catch (err) {
        this.status.textContent = err instanceof Error ? err.message : String(err);
      }
    });
  }

  /** PIDs of the nodes currently drawn. */
  nodePids(): string[] {
    return [...this.svg.querySelectorAll<SVGGElement>("g.graph-node")].map(
      (node) => node.getAttribute("data-pid") ?? "",
    );
  }

  currentModel(): GraphModel | null {
    return this.model;
  }

  render(): Promise<void> {
    return this.queue.run(async () => {
      const root = this.rootSelect.value;
      if (!root) {
        this.status.textContent = "pick a root work first";
        return;
      }
      try {
        const direction = this.direction();
        const maxDepth = Number(this.depthSlider.value);
        const hits = await this.client.closure(root, { direction, maxDepth });

        const pids: string[] = [root];
        const seen = new Set(pids);
        for (const hit of hits) {
          if (!seen.has(hit.pid)) {
            seen.add(hit.pid);
            pids.push(hit.pid);
          }
        }
        // Only the nodes that can survive the cap need their edges fetched.
        const edgeLists = new Map<string, EdgeDoc[]>();
        for (const pid of pids.slice(0, NODE_CAP)) {
          edgeLists.set(
            pid,
            direction === "inbound"
              ? await this.client.citedBy(pid)
              : await this.client.citations(pid),
          );
        }
        this.model = buildGraphModel(root, hits, edgeLists);
        this.banner.hidden = !this.model.truncated;
        renderGraph(this.svg, this.model, layoutGraph(this.model), {
          highlight: root,
          labelFor: (pid) => this.works.get(pid)?.name ?? pid,
          onSelect: (pid) => {
            const info = this.works.get(pid);
            if (info) this.callbacks.onSelect?.(info.fdoPid);
          },
        });
        this.status.textContent =
          `${this.model.nodes.length} node(s), ${this.model.edges.length} edge(s) ` +
          `at depth ≤ ${maxDepth} (${direction})`;
      } catch (err) {
        this.status.textContent = err instanceof Error ? err.message : String(err);
      }
    });
  }

  private direction(): "outbound" | "inbound" {
    const checked = this.element.querySelector<HTMLInputElement>(
      'input[name="explorer-direction"]:checked',
    );
    return checked?.value === "inbound" ? "inbound" : "outbound";
  }
}
