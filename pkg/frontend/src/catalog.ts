/**
 * Catalog browser: a paginated table over GET /fdos with a class filter and
 * a tombstone toggle. Row clicks hand the record to the editor.
 */

import type { ApiClient } from "./api.js";
import { clear, el, option, q } from "./dom.js";
import type { TaskQueue } from "./tasks.js";
import { METADATA_CLASSES, type FdoDoc, type MetadataClass } from "./types.js";

export const PAGE_SIZE = 20;

export interface CatalogCallbacks {
  onSelect?: (record: FdoDoc) => void;
}

export class CatalogView {
  readonly element: HTMLElement;
  private readonly classFilter: HTMLSelectElement;
  private readonly tombstoneToggle: HTMLInputElement;
  private readonly tableBody: HTMLTableSectionElement;
  private readonly pageInfo: HTMLElement;
  private readonly prevButton: HTMLButtonElement;
  private readonly nextButton: HTMLButtonElement;
  private readonly status: HTMLElement;
  private offset = 0;
  private total = 0;

  constructor(
    private readonly client: ApiClient,
    private readonly queue: TaskQueue,
    private readonly callbacks: CatalogCallbacks = {},
  ) {
    this.element = el("div", { class: "catalog-view" });
    this.element.innerHTML = `
      <div class="toolbar">
        <label>Class
          <select class="catalog-class-filter"><option value="">All classes</option></select>
        </label>
        <label class="toolbar-check">
          <input type="checkbox" class="catalog-tombstones"> Include tombstoned
        </label>
        <button type="button" class="catalog-refresh">Refresh</button>
      </div>
      <table class="catalog-table">
        <thead>
          <tr><th>PID</th><th>Class</th><th>Name</th><th>Version</th><th>Status</th></tr>
        </thead>
        <tbody></tbody>
      </table>
      <div class="pager">
        <button type="button" class="catalog-prev">Previous</button>
        <span class="catalog-page-info"></span>
        <button type="button" class="catalog-next">Next</button>
      </div>
      <div class="catalog-status" role="status"></div>
    `;
    this.classFilter = q(this.element, ".catalog-class-filter");
    for (const name of METADATA_CLASSES) this.classFilter.append(option(name, name));
    this.tombstoneToggle = q(this.element, ".catalog-tombstones");
    this.tableBody = q(this.element, ".catalog-table tbody");
    this.pageInfo = q(this.element, ".catalog-page-info");
    this.prevButton = q(this.element, ".catalog-prev");
    this.nextButton = q(this.element, ".catalog-next");
    this.status = q(this.element, ".catalog-status");

    this.classFilter.addEventListener("change", () => {
      this.offset = 0;
      void this.refresh();
    });
    this.tombstoneToggle.addEventListener("change", () => {
      this.offset = 0;
      void this.refresh();
    });
    q<HTMLButtonElement>(this.element, ".catalog-refresh").addEventListener("click", () => {
      void this.refresh();
    });
    this.prevButton.addEventListener("click", () => {
      this.offset = Math.max(0, this.offset - PAGE_SIZE);
      void this.refresh();
    });
    this.nextButton.addEventListener("click", () => {
      if (this.offset + PAGE_SIZE < this.total) this.offset += PAGE_SIZE;
      void this.refresh();
    });
  }

  refresh(): Promise<void> {
    return this.queue.run(async () => {
      try {
        const page = await this.client.listFdos({
          classFilter: (this.classFilter.value || undefined) as MetadataClass | undefined,
          includeTombstoned: this.tombstoneToggle.checked || undefined,
          offset: this.offset,
          limit: PAGE_SIZE,
        });
        this.total = page.total;
        this.renderRows(page.items);
        const from = page.items.length === 0 ? 0 : this.offset + 1;
        const to = this.offset + page.items.length;
        this.pageInfo.textContent = `${from}–${to} of ${page.total}`;
        this.prevButton.disabled = this.offset === 0;
        this.nextButton.disabled = to >= page.total;
        this.status.textContent = "";
      } catch (err) {
        this.status.textContent = err instanceof Error ? err.message : String(err);
      }
    });
  }

  totalCount(): number {
    return this.total;
  }

  rowPids(): string[] {
    return [...this.tableBody.querySelectorAll<HTMLTableRowElement>("tr[data-pid]")].map(
      (row) => row.dataset["pid"] ?? "",
    );
  }

  private renderRows(items: FdoDoc[]): void {
    clear(this.tableBody);
    for (const record of items) {
      const row = el("tr", {
        class:
          record.status === "tombstoned" ? "catalog-row catalog-tombstoned" : "catalog-row",
        "data-pid": record.pid,
      });
      const name = record.metadata["name"];
      for (const text of [
        record.pid,
        record.class,
        typeof name === "string" ? name : "",
        String(record.version),
        record.status,
      ]) {
        row.append(el("td", {}, text));
      }
      row.addEventListener("click", () => this.callbacks.onSelect?.(record));
      this.tableBody.append(row);
    }
  }
}
