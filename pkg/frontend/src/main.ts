/**
 * App shell: tabbed navigation wiring the catalog browser, record editor,
 * graph explorer, operation console, and request log over one shared API
 * client. The server base URL comes from the mount point's data-api-base
 * attribute (empty string = same origin), so a static build can point at
 * any running service.
 */

import { ApiClient, RequestLog } from "./api.js";
import { CatalogView } from "./catalog.js";
import { ConsoleView } from "./console.js";
import { clear, el, q } from "./dom.js";
import { EditorView } from "./editor.js";
import { ExplorerView } from "./explorer.js";
import { TaskQueue } from "./tasks.js";

export type TabName = "catalog" | "editor" | "explorer" | "console" | "log";

const TABS: ReadonlyArray<{ name: TabName; label: string }> = [
  { name: "catalog", label: "Catalog" },
  { name: "editor", label: "Editor" },
  { name: "explorer", label: "Graph explorer" },
  { name: "console", label: "Operations" },
  { name: "log", label: "Request log" },
];

export interface App {
  client: ApiClient;
  log: RequestLog;
  queue: TaskQueue;
  catalog: CatalogView;
  editor: EditorView;
  explorer: ExplorerView;
  console: ConsoleView;
  show(tab: TabName): void;
  /** Resolves when every queued UI action has settled. */
  idle(): Promise<void>;
}

export function createApp(root: HTMLElement, baseUrl = ""): App {
  const log = new RequestLog();
  const client = new ApiClient(baseUrl, log);
  const queue = new TaskQueue();

  root.classList.add("fdom-playground");
  root.innerHTML = `
    <header class="app-header">
      <h1>FDO Manager Playground</h1>
      <span class="service-info"></span>
    </header>
    <nav class="app-nav"></nav>
    <main class="app-main"></main>
  `;
  const nav = q<HTMLElement>(root, ".app-nav");
  const main = q<HTMLElement>(root, ".app-main");

  const editor = new EditorView(client, queue, {
    onMutation: () => {
      void catalog.refresh();
      void explorer.refreshRoots();
    },
  });
  const catalog = new CatalogView(client, queue, {
    onSelect: (record) => {
      void editor.loadRecord(record.pid);
      show("editor");
    },
  });
  const explorer = new ExplorerView(client, queue, {
    onSelect: (fdoPid) => {
      void editor.loadRecord(fdoPid);
      show("editor");
    },
  });
  const consoleView = new ConsoleView(client, queue);

  const logView = el("div", { class: "log-view" });
  logView.innerHTML = `
    <div class="toolbar"><button type="button" class="log-refresh">Refresh</button></div>
    <div class="log-verdict"></div>
    <table class="log-table">
      <thead><tr><th>#</th><th>Method</th><th>Path</th><th>Status</th></tr></thead>
      <tbody></tbody>
    </table>
  `;
  const renderLog = (): void => {
    const entries = log.entries();
    const bad = log.undocumented();
    q<HTMLElement>(logView, ".log-verdict").textContent =
      `${entries.length} request(s); documented endpoints only: ${bad.length === 0 ? "yes" : "NO"}`;
    const body = q<HTMLTableSectionElement>(logView, ".log-table tbody");
    clear(body);
    entries.forEach((entry, i) => {
      const row = el("tr", {
        class: bad.includes(entry) ? "log-row log-undocumented" : "log-row",
      });
      for (const text of [String(i + 1), entry.method, entry.path, String(entry.status)]) {
        row.append(el("td", {}, text));
      }
      body.append(row);
    });
  };
  q<HTMLButtonElement>(logView, ".log-refresh").addEventListener("click", renderLog);

  const sections = new Map<TabName, HTMLElement>([
    ["catalog", catalog.element],
    ["editor", editor.element],
    ["explorer", explorer.element],
    ["console", consoleView.element],
    ["log", logView],
  ]);
  const buttons = new Map<TabName, HTMLButtonElement>();
  for (const tab of TABS) {
    const button = el("button", { type: "button", class: "nav-tab" }, tab.label);
    button.dataset["tab"] = tab.name;
    button.addEventListener("click", () => show(tab.name));
    nav.append(button);
    buttons.set(tab.name, button);
    main.append(sections.get(tab.name)!);
  }

  function show(tab: TabName): void {
    for (const [name, section] of sections) {
      section.hidden = name !== tab;
      buttons.get(name)?.classList.toggle("nav-active", name === tab);
    }
    if (tab === "log") renderLog();
  }

  show("catalog");
  void queue.run(async () => {
    try {
      const info = await client.serviceInfo();
      q<HTMLElement>(root, ".service-info").textContent =
        `${info.service} v${info.version} · PID prefix ${info.pid_prefix}`;
    } catch {
      q<HTMLElement>(root, ".service-info").textContent = "service unreachable";
    }
  });
  void catalog.refresh();
  void explorer.refreshRoots();

  return {
    client,
    log,
    queue,
    catalog,
    editor,
    explorer,
    console: consoleView,
    show,
    idle: () => queue.idle(),
  };
}

// Static-page bootstrap: index.html provides <div id="fdom-app">.
const mount = document.getElementById("fdom-app");
if (mount instanceof HTMLElement) {
  createApp(mount, mount.dataset["apiBase"] ?? "");
}
