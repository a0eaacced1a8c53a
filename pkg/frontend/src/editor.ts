/**
 * Record editor: schema-driven forms for create, load, dry-run validate,
 * versioned save, and tombstoning.
 *
 * Field widgets are built from GET /schema/{class} at runtime. Reference
 * pickers are populated from the catalog, filtered to the classes the
 * schema allows for that property — a CreativeWork's creator picker offers
 * Person and Organization records and nothing else. Saves send If-Match
 * with the version this form was loaded from; a stale save surfaces the
 * server's 412 conflict with a reload prompt.
 */

import { ApiError, type ApiClient, type VersionedFdo } from "./api.js";
import { clear, el, option, q } from "./dom.js";
import { FormModel } from "./schemaForm.js";
import type { TaskQueue } from "./tasks.js";
import {
  METADATA_CLASSES,
  type CreateFdoBody,
  type MetadataClass,
  type PropertySpecDoc,
  type UpdateFdoBody,
  type ValidationReportDoc,
} from "./types.js";

export interface EditorCallbacks {
  /** Fired after any successful create, save, or tombstone. */
  onMutation?: () => void;
}

interface RefChoice {
  metadataPid: string;
  label: string;
}

interface FieldWidget {
  spec: PropertySpecDoc;
  container: HTMLElement;
  messages: HTMLElement;
  read(): string | string[];
  write(value: unknown): void;
}

function isReportDoc(details: unknown): details is ValidationReportDoc {
  return (
    typeof details === "object" &&
    details !== null &&
    Array.isArray((details as { violations?: unknown }).violations)
  );
}

export class EditorView {
  readonly element: HTMLElement;
  private readonly classSelect: HTMLSelectElement;
  private readonly doRefInput: HTMLInputElement;
  private readonly checksumInput: HTMLInputElement;
  private readonly fieldsContainer: HTMLElement;
  private readonly reportPane: HTMLPreElement;
  private readonly banner: HTMLElement;
  private readonly bannerMessage: HTMLElement;
  private readonly status: HTMLElement;
  private readonly generalMessages: HTMLElement;
  private readonly pidLine: HTMLElement;
  private readonly saveButton: HTMLButtonElement;
  private readonly deleteButton: HTMLButtonElement;
  private readonly deleteReason: HTMLInputElement;

  private model: FormModel | null = null;
  private widgets: FieldWidget[] = [];
  private loaded: VersionedFdo | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly queue: TaskQueue,
    private readonly callbacks: EditorCallbacks = {},
  ) {
    this.element = el("div", { class: "editor-view" });
    this.element.innerHTML = `
      <div class="conflict-banner" hidden>
        <span class="conflict-message"></span>
        <button type="button" class="conflict-reload">Reload latest version</button>
      </div>
      <div class="editor-head">
        <label>Class
          <select class="editor-class"><option value="">— choose a class —</option></select>
        </label>
        <button type="button" class="editor-new">New record</button>
        <span class="editor-pid"></span>
      </div>
      <div class="editor-core">
        <label class="editor-field" data-field="do_ref">
          <span class="field-name">do_ref (digital object URI)</span>
          <input class="editor-do-ref field-input" placeholder="https://…">
        </label>
        <label class="editor-field" data-field="do_checksum">
          <span class="field-name">do_checksum (sha256:&lt;hex&gt;, optional)</span>
          <input class="editor-checksum field-input" placeholder="sha256:…">
        </label>
      </div>
      <div class="editor-fields"></div>
      <div class="editor-general-messages"></div>
      <div class="editor-actions">
        <button type="button" class="editor-validate">Validate</button>
        <button type="button" class="editor-create">Create</button>
        <button type="button" class="editor-save" disabled>Save</button>
        <input class="editor-delete-reason" placeholder="tombstone reason">
        <button type="button" class="editor-delete" disabled>Tombstone</button>
      </div>
      <div class="editor-status" role="status"></div>
      <pre class="validate-report" hidden></pre>
    `;
    this.classSelect = q(this.element, ".editor-class");
    for (const name of METADATA_CLASSES) this.classSelect.append(option(name, name));
    this.doRefInput = q(this.element, ".editor-do-ref");
    this.checksumInput = q(this.element, ".editor-checksum");
    this.fieldsContainer = q(this.element, ".editor-fields");
    this.reportPane = q(this.element, ".validate-report");
    this.banner = q(this.element, ".conflict-banner");
    this.bannerMessage = q(this.element, ".conflict-message");
    this.status = q(this.element, ".editor-status");
    this.generalMessages = q(this.element, ".editor-general-messages");
    this.pidLine = q(this.element, ".editor-pid");
    this.saveButton = q(this.element, ".editor-save");
    this.deleteButton = q(this.element, ".editor-delete");
    this.deleteReason = q(this.element, ".editor-delete-reason");

    this.classSelect.addEventListener("change", () => {
      const name = this.classSelect.value as MetadataClass | "";
      void this.queue.run(async () => {
        this.resetToBlank();
        if (name) await this.applyClass(name);
      });
    });
    q<HTMLButtonElement>(this.element, ".editor-new").addEventListener("click", () => {
      const name = this.classSelect.value as MetadataClass | "";
      void this.queue.run(async () => {
        this.resetToBlank();
        if (name) await this.applyClass(name);
      });
    });
    q<HTMLButtonElement>(this.element, ".conflict-reload").addEventListener("click", () => {
      const pid = this.loaded?.record.pid;
      if (pid) void this.loadRecord(pid);
    });
    q<HTMLButtonElement>(this.element, ".editor-validate").addEventListener("click", () => {
      void this.queue.run(() => this.runValidate());
    });
    q<HTMLButtonElement>(this.element, ".editor-create").addEventListener("click", () => {
      void this.queue.run(() => this.runCreate());
    });
    this.saveButton.addEventListener("click", () => {
      void this.queue.run(() => this.runSave());
    });
    this.deleteButton.addEventListener("click", () => {
      void this.queue.run(() => this.runDelete());
    });
  }

  /** The record this form is editing, if any. */
  current(): VersionedFdo | null {
    return this.loaded;
  }

  loadRecord(pid: string): Promise<void> {
    return this.queue.run(async () => {
      try {
        const got = await this.client.getFdo(pid);
        await this.applyClass(got.record.class);
        this.classSelect.value = got.record.class;
        this.doRefInput.value = got.record.do_ref;
        this.checksumInput.value = got.record.do_checksum ?? "";
        for (const widget of this.widgets) {
          widget.write(got.record.metadata[widget.spec.name]);
        }
        this.adopt(got);
        this.banner.hidden = true;
        this.reportPane.hidden = true;
        this.status.textContent = `loaded ${got.record.pid}`;
      } catch (err) {
        this.report(err);
      }
    });
  }

  // -- form plumbing ----------------------------------------------------

  private resetToBlank(): void {
    this.model = null;
    this.widgets = [];
    this.loaded = null;
    clear(this.fieldsContainer);
    clear(this.generalMessages);
    this.doRefInput.value = "";
    this.checksumInput.value = "";
    this.pidLine.textContent = "";
    this.status.textContent = "";
    this.reportPane.hidden = true;
    this.banner.hidden = true;
    this.saveButton.disabled = true;
    this.deleteButton.disabled = true;
  }

  /** Fetch the schema and reference choices for a class, then build widgets. */
  private async applyClass(name: MetadataClass): Promise<void> {
    const schema = await this.client.schema(name);
    this.model = new FormModel(schema);
    const choices = await this.loadChoices(schema.properties);
    clear(this.fieldsContainer);
    this.widgets = schema.properties.map((spec) => this.buildWidget(spec, choices));
    for (const widget of this.widgets) this.fieldsContainer.append(widget.container);
  }

  /** Catalog records of every class some ref property may point at. */
  private async loadChoices(
    specs: PropertySpecDoc[],
  ): Promise<Map<MetadataClass, RefChoice[]>> {
    const wanted = new Set<MetadataClass>();
    for (const spec of specs) {
      for (const name of spec.allowed_classes ?? []) wanted.add(name);
    }
    const choices = new Map<MetadataClass, RefChoice[]>();
    for (const name of [...wanted].sort()) {
      const page = await this.client.listFdos({ classFilter: name, limit: 500 });
      choices.set(
        name,
        page.items.map((record) => {
          const label = record.metadata["name"];
          return {
            metadataPid: record.metadata_pid,
            label: `${typeof label === "string" ? label : record.metadata_pid} · ${name}`,
          };
        }),
      );
    }
    return choices;
  }

  private choicesFor(
    spec: PropertySpecDoc,
    choices: Map<MetadataClass, RefChoice[]>,
  ): RefChoice[] {
    const merged: RefChoice[] = [];
    for (const name of spec.allowed_classes ?? []) {
      merged.push(...(choices.get(name) ?? []));
    }
    return merged.sort((a, b) => a.label.localeCompare(b.label));
  }

  private buildWidget(
    spec: PropertySpecDoc,
    choices: Map<MetadataClass, RefChoice[]>,
  ): FieldWidget {
    const container = el("div", { class: "editor-field", "data-field": spec.name });
    const title = spec.required ? `${spec.name} *` : spec.name;
    container.append(el("span", { class: "field-name" }, title));
    const messages = el("ul", { class: "field-messages" });

    // A loaded record may reference something the picker did not list (for
    // example a tombstoned target); add it so the value is not dropped.
    const ensureOption = (select: HTMLSelectElement, value: string): void => {
      if (value && ![...select.options].some((item) => item.value === value)) {
        select.append(option(value, `${value} (not in catalog)`));
      }
    };

    let widget: FieldWidget;
    if (spec.shape === "ref") {
      const select = el("select", { class: "field-input" });
      select.append(option("", "— none —"));
      for (const choice of this.choicesFor(spec, choices)) {
        select.append(option(choice.metadataPid, choice.label));
      }
      container.append(select);
      widget = {
        spec,
        container,
        messages,
        read: () => select.value,
        write: (value) => {
          const text = typeof value === "string" ? value : "";
          ensureOption(select, text);
          select.value = text;
        },
      };
    } else if (spec.shape === "ref_list") {
      const items = el("div", { class: "field-items" });
      const add = el("button", { type: "button", class: "field-add" }, "Add reference");
      const refChoices = this.choicesFor(spec, choices);
      const addItem = (value: string): void => {
        const row = el("div", { class: "field-item-row" });
        const select = el("select", { class: "field-item" });
        select.append(option("", "— pick a record —"));
        for (const choice of refChoices) {
          select.append(option(choice.metadataPid, choice.label));
        }
        ensureOption(select, value);
        select.value = value;
        const remove = el("button", { type: "button", class: "field-remove" }, "Remove");
        remove.addEventListener("click", () => row.remove());
        row.append(select, remove);
        items.append(row);
      };
      add.addEventListener("click", () => addItem(""));
      container.append(items, add);
      widget = {
        spec,
        container,
        messages,
        read: () =>
          [...items.querySelectorAll<HTMLSelectElement>("select.field-item")].map(
            (select) => select.value,
          ),
        write: (value) => {
          clear(items);
          if (Array.isArray(value)) {
            for (const item of value) addItem(typeof item === "string" ? item : "");
          }
        },
      };
    } else if (spec.shape === "string_list") {
      const area = el("textarea", { class: "field-input", rows: "3" });
      area.placeholder = "one entry per line";
      container.append(area);
      widget = {
        spec,
        container,
        messages,
        read: () => area.value.split("\n"),
        write: (value) => {
          area.value = Array.isArray(value) ? value.map(String).join("\n") : "";
        },
      };
    } else if (spec.allowed_values && spec.allowed_values.length > 0) {
      const select = el("select", { class: "field-input" });
      select.append(option("", "— choose —"));
      for (const value of spec.allowed_values) select.append(option(value, value));
      container.append(select);
      widget = {
        spec,
        container,
        messages,
        read: () => select.value,
        write: (value) => {
          select.value = typeof value === "string" ? value : "";
        },
      };
    } else {
      const input = el("input", { class: "field-input" });
      container.append(input);
      widget = {
        spec,
        container,
        messages,
        read: () => input.value,
        write: (value) => {
          input.value = typeof value === "string" ? value : "";
        },
      };
    }
    container.append(messages);
    return widget;
  }

  /** Push every widget's DOM state into the form model. */
  private readForm(): FormModel {
    if (!this.model) throw new Error("choose a class first");
    for (const widget of this.widgets) {
      this.model.setValue(widget.spec.name, widget.read());
    }
    return this.model;
  }

  private renderMessages(): void {
    if (!this.model) return;
    for (const widget of this.widgets) {
      clear(widget.messages);
      for (const text of this.model.messagesFor(widget.spec.name)) {
        widget.messages.append(el("li", {}, text));
      }
    }
    clear(this.generalMessages);
    for (const text of this.model.generalMessages()) {
      this.generalMessages.append(el("div", { class: "general-message" }, text));
    }
  }

  private adopt(got: VersionedFdo): void {
    this.loaded = got;
    this.pidLine.textContent = `${got.record.pid} · v${got.record.version}`;
    this.saveButton.disabled = false;
    this.deleteButton.disabled = false;
  }

  private report(err: unknown): void {
    if (err instanceof ApiError) {
      this.status.textContent = `${err.status} ${err.code}: ${err.message}`;
      if (err.status === 422 && isReportDoc(err.details) && this.model) {
        this.model.applyReport(err.details);
        this.renderMessages();
      }
    } else {
      this.status.textContent = err instanceof Error ? err.message : String(err);
    }
  }

  // -- actions ------------------------------------------------------------

  private async runValidate(): Promise<void> {
    try {
      const model = this.readForm();
      const report = await this.client.validate(model.className, model.properties());
      model.applyReport(report);
      this.renderMessages();
      this.reportPane.hidden = false;
      this.reportPane.textContent = JSON.stringify(report, null, 2);
      this.status.textContent = report.ok
        ? "validation passed"
        : `validation found ${report.violations.length} problem(s)`;
    } catch (err) {
      this.report(err);
    }
  }

  private async runCreate(): Promise<void> {
    try {
      const model = this.readForm();
      const body: CreateFdoBody = {
        do_ref: this.doRefInput.value.trim(),
        class: model.className,
        properties: model.properties(),
      };
      const checksum = this.checksumInput.value.trim();
      if (checksum) body.do_checksum = checksum;
      const made = await this.client.createFdo(body);
      this.adopt(made);
      model.clearMessages();
      this.renderMessages();
      this.reportPane.hidden = true;
      this.status.textContent = `created ${made.record.pid}`;
      this.callbacks.onMutation?.();
    } catch (err) {
      this.report(err);
    }
  }

  private async runSave(): Promise<void> {
    const current = this.loaded;
    if (!current) {
      this.status.textContent = "load or create a record first";
      return;
    }
    try {
      const model = this.readForm();
      const body: UpdateFdoBody = {
        do_ref: this.doRefInput.value.trim(),
        properties: model.properties(),
      };
      const checksum = this.checksumInput.value.trim();
      if (checksum && checksum !== (current.record.do_checksum ?? "")) {
        body.do_checksum = checksum;
      }
      const saved = await this.client.updateFdo(current.record.pid, current.etag, body);
      this.adopt(saved);
      model.clearMessages();
      this.renderMessages();
      this.banner.hidden = true;
      this.status.textContent = `saved ${saved.record.pid} at v${saved.record.version}`;
      this.callbacks.onMutation?.();
    } catch (err) {
      if (err instanceof ApiError && err.status === 412) {
        this.showConflict(err.details);
      } else {
        this.report(err);
      }
    }
  }

  private showConflict(details: unknown): void {
    const info = details as { current_version?: number; expected_version?: number } | null;
    const current = info?.current_version ?? "?";
    const expected = info?.expected_version ?? "?";
    this.bannerMessage.textContent =
      `Version conflict: the server is at v${current} but this form was loaded ` +
      `from v${expected}. Reload to pick up the latest copy, then reapply your edit.`;
    this.banner.hidden = false;
    this.status.textContent = "save rejected: stale version";
  }

  private async runDelete(): Promise<void> {
    const current = this.loaded;
    if (!current) {
      this.status.textContent = "load or create a record first";
      return;
    }
    try {
      const reason = this.deleteReason.value.trim();
      const tombstone = await this.client.deleteFdo(
        current.record.pid,
        reason.length > 0 ? reason : undefined,
      );
      this.loaded = null;
      this.saveButton.disabled = true;
      this.deleteButton.disabled = true;
      this.pidLine.textContent = `${tombstone.pid} · tombstoned`;
      this.status.textContent = `tombstoned ${tombstone.pid}`;
      this.callbacks.onMutation?.();
    } catch (err) {
      this.report(err);
    }
  }
}
