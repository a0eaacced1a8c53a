/**
 * Operation console: list the operations applicable to a record, substitute
 * the chosen descriptor's path template, invoke it, and show the raw
 * request/response exchange.
 *
 * Custom descriptors may carry templates that lead outside this service's
 * documented API (they describe operations hosted elsewhere); those render
 * as a preview only and are never sent.
 */

import {
  isDocumentedRequest,
  substitutePidTemplate,
  type ApiClient,
  type HttpMethod,
} from "./api.js";
import { clear, el, q } from "./dom.js";
import type { TaskQueue } from "./tasks.js";
import { METADATA_CLASSES, type OperationDoc } from "./types.js";

export class ConsoleView {
  readonly element: HTMLElement;
  private readonly pidInput: HTMLInputElement;
  private readonly opsBody: HTMLTableSectionElement;
  private readonly preview: HTMLElement;
  private readonly note: HTMLElement;
  private readonly invokeButton: HTMLButtonElement;
  private readonly requestPane: HTMLPreElement;
  private readonly responsePane: HTMLPreElement;
  private selected: OperationDoc | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly queue: TaskQueue,
  ) {
    this.element = el("div", { class: "console-view" });
    this.element.innerHTML = `
      <div class="toolbar">
        <label>FDO PID <input class="console-pid" placeholder="prefix/suffix"></label>
        <button type="button" class="console-load">List operations</button>
      </div>
      <table class="console-ops">
        <thead>
          <tr><th>op_id</th><th>Name</th><th>Method</th><th>Path template</th><th>Classes</th></tr>
        </thead>
        <tbody></tbody>
      </table>
      <div class="console-selected">
        <code class="console-preview"></code>
        <button type="button" class="console-invoke" disabled>Invoke</button>
        <span class="console-note"></span>
      </div>
      <pre class="console-request"></pre>
      <pre class="console-response"></pre>
      <fieldset class="console-register">
        <legend>Register an operation</legend>
        <label>op_id <input class="register-op-id" placeholder="lower-case id"></label>
        <label>Name <input class="register-name"></label>
        <label>Method
          <select class="register-method">
            <option>GET</option><option>POST</option><option>PUT</option><option>DELETE</option>
          </select>
        </label>
        <label>Path template <input class="register-template" placeholder="/fdos/{pid}/…"></label>
        <span class="register-classes"></span>
        <label>Description <input class="register-description"></label>
        <button type="button" class="console-register-submit">Register</button>
      </fieldset>
    `;
    this.pidInput = q(this.element, ".console-pid");
    this.opsBody = q(this.element, ".console-ops tbody");
    this.preview = q(this.element, ".console-preview");
    this.note = q(this.element, ".console-note");
    this.invokeButton = q(this.element, ".console-invoke");
    this.requestPane = q(this.element, ".console-request");
    this.responsePane = q(this.element, ".console-response");

    const classBoxes = q(this.element, ".register-classes");
    for (const name of METADATA_CLASSES) {
      const label = el("label", { class: "toolbar-check" });
      const box = el("input", { type: "checkbox", class: "register-class" });
      box.dataset["class"] = name;
      label.append(box, ` ${name}`);
      classBoxes.append(label);
    }

    q<HTMLButtonElement>(this.element, ".console-load").addEventListener("click", () => {
      void this.load();
    });
    this.invokeButton.addEventListener("click", () => {
      void this.invoke();
    });
    q<HTMLButtonElement>(this.element, ".console-register-submit").addEventListener(
      "click",
      () => {
        void this.register();
      },
    );
  }

  /** List the operations applicable to the PID in the input box. */
  load(): Promise<void> {
    return this.queue.run(async () => {
      this.selected = null;
      this.preview.textContent = "";
      this.note.textContent = "";
      this.invokeButton.disabled = true;
      clear(this.opsBody);
      await this.reloadOps(true);
    });
  }

  private select(op: OperationDoc): void {
    this.selected = op;
    const pid = this.pidInput.value.trim();
    const path = substitutePidTemplate(op.path_template, pid);
    this.preview.textContent = `${op.http_method} ${path}`;
    if (isDocumentedRequest(op.http_method, path)) {
      this.invokeButton.disabled = false;
      this.note.textContent = "";
    } else {
      this.invokeButton.disabled = true;
      this.note.textContent =
        "path template leads outside this service's documented API — preview only";
    }
  }

  private invoke(): Promise<void> {
    return this.queue.run(async () => {
      const op = this.selected;
      const pid = this.pidInput.value.trim();
      if (!op || !pid) return;
      const path = substitutePidTemplate(op.path_template, pid);
      if (!isDocumentedRequest(op.http_method, path)) return;
      const exchange = await this.client.raw(op.http_method as HttpMethod, path);
      this.showExchange(`${op.http_method} ${path}`, exchange.status, exchange.body);
    });
  }

  private register(): Promise<void> {
    return this.queue.run(async () => {
      const classes = [
        ...this.element.querySelectorAll<HTMLInputElement>("input.register-class:checked"),
      ].map((box) => box.dataset["class"] ?? "");
      const body = {
        op_id: q<HTMLInputElement>(this.element, ".register-op-id").value.trim(),
        name: q<HTMLInputElement>(this.element, ".register-name").value.trim(),
        http_method: q<HTMLSelectElement>(this.element, ".register-method").value,
        path_template: q<HTMLInputElement>(this.element, ".register-template").value.trim(),
        applicable_classes: classes,
        description: q<HTMLInputElement>(this.element, ".register-description").value.trim(),
      };
      const exchange = await this.client.raw("POST", "/operations", body);
      this.showExchange("POST /operations", exchange.status, exchange.body);
      // A new descriptor may apply to the record whose operations are shown.
      if (exchange.status === 201 && this.pidInput.value.trim()) await this.reloadOps();
    });
  }

  /** Re-fetch and redraw the operations table for the current PID. */
  private async reloadOps(showErrors = false): Promise<void> {
    const pid = this.pidInput.value.trim();
    if (!pid) return;
    const exchange = await this.client.raw("GET", `/fdos/${pid}/operations`);
    if (exchange.status !== 200) {
      // Show error bodies (404, 410 with tombstone, …) verbatim on explicit loads.
      if (showErrors) {
        this.showExchange(`GET /fdos/${pid}/operations`, exchange.status, exchange.body);
      }
      return;
    }
    clear(this.opsBody);
    for (const op of exchange.body as OperationDoc[]) {
      const row = el("tr", { class: "console-op" });
      row.dataset["opId"] = op.op_id;
      for (const text of [
        op.op_id,
        op.name,
        op.http_method,
        op.path_template,
        op.applicable_classes.join(", "),
      ]) {
        row.append(el("td", {}, text));
      }
      row.addEventListener("click", () => this.select(op));
      this.opsBody.append(row);
    }
  }

  private showExchange(request: string, status: number, body: unknown): void {
    this.requestPane.textContent = request;
    this.responsePane.textContent = `HTTP ${status}\n${JSON.stringify(body, null, 2)}`;
  }
}
