/**
 * Schema-driven form model.
 *
 * Field descriptors come from GET /schema/{class} at runtime, so forms can
 * never drift from the server's validation rules: there is no client-side
 * field list to go stale. Validation messages are distributed from the
 * server's own report (POST /validate or a 422 body), never invented here.
 */

import type {
  MetadataClass,
  PropertyShape,
  PropertySpecDoc,
  SchemaDoc,
  ValidationReportDoc,
} from "./types.js";

export function isListShape(shape: PropertyShape): boolean {
  return shape === "ref_list" || shape === "string_list";
}

export function isRefShape(shape: PropertyShape): boolean {
  return shape === "ref" || shape === "ref_list";
}

export interface FieldState {
  spec: PropertySpecDoc;
  /** string for scalar shapes, string[] for list shapes. */
  value: string | string[];
  /** Validation messages for this field, from the last applied report. */
  messages: string[];
}

/** Map a violation path like "creator[0]" onto its field name. */
export function fieldNameOf(path: string): string {
  const bracket = path.indexOf("[");
  return bracket === -1 ? path : path.slice(0, bracket);
}

export class FormModel {
  readonly className: MetadataClass;
  private readonly fields = new Map<string, FieldState>();
  private extraMessages: string[] = [];

  constructor(schema: SchemaDoc) {
    this.className = schema.class;
    for (const spec of schema.properties) {
      this.fields.set(spec.name, {
        spec,
        value: isListShape(spec.shape) ? [] : "",
        messages: [],
      });
    }
  }

  fieldNames(): string[] {
    return [...this.fields.keys()];
  }

  field(name: string): FieldState {
    const state = this.fields.get(name);
    if (!state) throw new Error(`no such field: ${name}`);
    return state;
  }

  setValue(name: string, value: string | string[]): void {
    const state = this.field(name);
    if (isListShape(state.spec.shape) !== Array.isArray(value)) {
      throw new Error(`value shape mismatch for field: ${name}`);
    }
    state.value = value;
  }

  /**
   * Build the properties payload for POST /fdos, PUT, or POST /validate.
   * Blank entries are dropped, so an untouched optional field stays absent
   * and an untouched required field draws the server's REQUIRED_MISSING.
   */
  properties(): Record<string, unknown> {
    const payload: Record<string, unknown> = {};
    for (const [name, state] of this.fields) {
      if (Array.isArray(state.value)) {
        const items = state.value.map((item) => item.trim()).filter((item) => item.length > 0);
        if (items.length > 0) payload[name] = items;
      } else {
        const item = state.value.trim();
        if (item.length > 0) payload[name] = item;
      }
    }
    return payload;
  }

  /** Distribute a server validation report onto per-field message lists. */
  applyReport(report: ValidationReportDoc): void {
    this.clearMessages();
    for (const violation of report.violations) {
      const state = this.fields.get(fieldNameOf(violation.path));
      const text = `${violation.code}: ${violation.message}`;
      if (state) state.messages.push(text);
      else this.extraMessages.push(text);
    }
  }

  clearMessages(): void {
    for (const state of this.fields.values()) state.messages = [];
    this.extraMessages = [];
  }

  messagesFor(name: string): string[] {
    return this.field(name).messages;
  }

  /** Messages whose violation path matched no schema field. */
  generalMessages(): string[] {
    return this.extraMessages;
  }
}
