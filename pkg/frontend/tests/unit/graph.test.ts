import { describe, expect, it } from "vitest";

import {
  FRAME_HEIGHT,
  FRAME_WIDTH,
  NODE_CAP,
  SVG_NS,
  buildGraphModel,
  layoutGraph,
  renderGraph,
  type GraphModel,
} from "../../src/graph.js";
import type { ClosureHitDoc, EdgeDoc } from "../../src/types.js";

const edge = (from: string, to: string, ordinal = 0): EdgeDoc => ({
  from,
  to,
  label: "citation",
  ordinal,
});

const A = "p/aa";
const B = "p/bb";
const C = "p/cc";

describe("buildGraphModel", () => {
  it("renders a citation chain as three nodes and two edges", () => {
    const hits: ClosureHitDoc[] = [
      { pid: B, depth: 1 },
      { pid: C, depth: 2 },
    ];
    const edges = new Map([
      [A, [edge(A, B)]],
      [B, [edge(B, C)]],
      [C, []],
    ]);
    const model = buildGraphModel(A, hits, edges);
    expect(model.nodes).toEqual([
      { pid: A, depth: 0 },
      { pid: B, depth: 1 },
      { pid: C, depth: 2 },
    ]);
    expect(model.edges).toEqual([
      { from: A, to: B, ordinal: 0 },
      { from: B, to: C, ordinal: 0 },
    ]);
    expect(model.truncated).toBe(false);
  });

  it("keeps a two-node cycle finite with one node per pid", () => {
    // A cites B, B cites A: the closure revisits the root at depth 2.
    const hits: ClosureHitDoc[] = [
      { pid: B, depth: 1 },
      { pid: A, depth: 2 },
    ];
    const edges = new Map([
      [A, [edge(A, B)]],
      [B, [edge(B, A)]],
    ]);
    const model = buildGraphModel(A, hits, edges);
    expect(model.nodes.map((n) => n.pid)).toEqual([A, B]);
    expect(model.edges).toEqual([
      { from: A, to: B, ordinal: 0 },
      { from: B, to: A, ordinal: 0 },
    ]);
  });

  it("keeps a self-citation as a loop edge", () => {
    const edges = new Map([[A, [edge(A, A, 1)]]]);
    const model = buildGraphModel(A, [], edges);
    expect(model.nodes.map((n) => n.pid)).toEqual([A]);
    expect(model.edges).toEqual([{ from: A, to: A, ordinal: 1 }]);
  });

  it("collapses an edge reported by both of its endpoints", () => {
    const hits: ClosureHitDoc[] = [{ pid: B, depth: 1 }];
    const edges = new Map([
      [A, [edge(A, B)]],
      [B, [edge(A, B)]],
    ]);
    const model = buildGraphModel(A, hits, edges);
    expect(model.edges).toEqual([{ from: A, to: B, ordinal: 0 }]);
  });

  it("caps the node count, flags truncation, and drops outside edges", () => {
    const hits: ClosureHitDoc[] = [];
    const edges = new Map<string, EdgeDoc[]>();
    for (let i = 0; i < 300; i++) {
      const pid = `p/n${String(i).padStart(3, "0")}`;
      hits.push({ pid, depth: 1 });
      edges.set(pid, [edge("p/root", pid)]);
    }
    edges.set("p/root", []);
    const model = buildGraphModel("p/root", hits, edges);
    expect(model.nodes).toHaveLength(NODE_CAP);
    expect(model.truncated).toBe(true);
    const kept = new Set(model.nodes.map((n) => n.pid));
    expect(kept.has("p/root")).toBe(true);
    for (const e of model.edges) {
      expect(kept.has(e.from)).toBe(true);
      expect(kept.has(e.to)).toBe(true);
    }
    // root + 199 targets survive, so 199 of the 300 edges remain
    expect(model.edges).toHaveLength(NODE_CAP - 1);
  });
});

describe("layoutGraph", () => {
  const ringModel = (): GraphModel => {
    const nodes = [];
    const edges = [];
    for (let i = 0; i < 30; i++) {
      nodes.push({ pid: `p/node${i}`, depth: i === 0 ? 0 : 1 });
      edges.push({ from: `p/node${i}`, to: `p/node${(i + 1) % 30}`, ordinal: 0 });
    }
    return { nodes, edges, truncated: false };
  };

  it("is deterministic", () => {
    const model = ringModel();
    const first = layoutGraph(model);
    const second = layoutGraph(model);
    expect([...second.entries()]).toEqual([...first.entries()]);
  });

  it("keeps every node inside the frame and off its neighbours", () => {
    const model = ringModel();
    const positions = layoutGraph(model);
    expect(positions.size).toBe(model.nodes.length);
    for (const point of positions.values()) {
      expect(point.x).toBeGreaterThanOrEqual(0);
      expect(point.x).toBeLessThanOrEqual(FRAME_WIDTH);
      expect(point.y).toBeGreaterThanOrEqual(0);
      expect(point.y).toBeLessThanOrEqual(FRAME_HEIGHT);
    }
    const points = [...positions.values()];
    for (let i = 0; i < points.length; i++) {
      for (let j = i + 1; j < points.length; j++) {
        const dist = Math.hypot(points[i]!.x - points[j]!.x, points[i]!.y - points[j]!.y);
        expect(dist).toBeGreaterThan(1);
      }
    }
  });

  it("centers a single node", () => {
    const model: GraphModel = { nodes: [{ pid: A, depth: 0 }], edges: [], truncated: false };
    const positions = layoutGraph(model);
    expect(positions.get(A)).toEqual({ x: FRAME_WIDTH / 2, y: FRAME_HEIGHT / 2 });
  });
});

describe("renderGraph", () => {
  const render = (model: GraphModel, onSelect?: (pid: string) => void): SVGSVGElement => {
    const svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    renderGraph(svg, model, layoutGraph(model), { onSelect, highlight: model.nodes[0]?.pid });
    return svg;
  };

  it("draws one group per node and one line per edge, and reports clicks", () => {
    const model: GraphModel = {
      nodes: [
        { pid: A, depth: 0 },
        { pid: B, depth: 1 },
        { pid: C, depth: 2 },
      ],
      edges: [
        { from: A, to: B, ordinal: 0 },
        { from: B, to: C, ordinal: 0 },
      ],
      truncated: false,
    };
    const picked: string[] = [];
    const svg = render(model, (pid) => picked.push(pid));

    const groups = svg.querySelectorAll("g.graph-node");
    expect(groups).toHaveLength(3);
    expect(svg.querySelectorAll("line.graph-edge")).toHaveLength(2);
    expect(svg.querySelector(`g[data-pid="${A}"]`)?.classList.contains("graph-root")).toBe(true);

    svg
      .querySelector(`g[data-pid="${B}"]`)
      ?.dispatchEvent(new Event("click", { bubbles: true }));
    expect(picked).toEqual([B]);
  });

  it("draws a self-citation as a loop path", () => {
    const model: GraphModel = {
      nodes: [{ pid: A, depth: 0 }],
      edges: [{ from: A, to: A, ordinal: 0 }],
      truncated: false,
    };
    const svg = render(model);
    expect(svg.querySelectorAll("path.graph-self-loop")).toHaveLength(1);
    expect(svg.querySelectorAll("line.graph-edge")).toHaveLength(0);
  });

  it("replaces previous content on re-render", () => {
    const svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    const big: GraphModel = {
      nodes: [
        { pid: A, depth: 0 },
        { pid: B, depth: 1 },
      ],
      edges: [{ from: A, to: B, ordinal: 0 }],
      truncated: false,
    };
    const small: GraphModel = { nodes: [{ pid: C, depth: 0 }], edges: [], truncated: false };
    renderGraph(svg, big, layoutGraph(big));
    renderGraph(svg, small, layoutGraph(small));
    expect(svg.querySelectorAll("g.graph-node")).toHaveLength(1);
    expect(svg.querySelector("g.graph-node")?.getAttribute("data-pid")).toBe(C);
  });
});
