/**
 * Typed client for the FDO manager's JSON API.
 *
 * Every request is recorded in an optional RequestLog, and the allowlist in
 * DOCUMENTED_ROUTES lets tests prove that a whole session stayed on the
 * documented endpoint surface. Non-2xx responses become ApiError values
 * carrying the uniform error body ({status, code, message, details}).
 */

import type {
  ApiErrorDoc,
  CatalogPage,
  ClosureHitDoc,
  CreateFdoBody,
  EdgeDoc,
  FdoDoc,
  MetadataClass,
  MetadataDoc,
  OperationDoc,
  PidResolution,
  SchemaDoc,
  ServiceInfo,
  TombstoneDoc,
  UpdateFdoBody,
  ValidationReportDoc,
} from "./types.js";

export type HttpMethod = "GET" | "POST" | "PUT" | "DELETE";

/** PIDs are `prefix/suffix`; both halves draw from this charset. */
const PID_SEGMENT = /^[A-Za-z0-9._-]+$/;

/**
 * The documented endpoint surface. `{pid}` stands for the two path segments
 * of one PID; `{class}` for a single class-name segment.
 */
export const DOCUMENTED_ROUTES: ReadonlyArray<{ method: HttpMethod; template: string }> = [
  { method: "GET", template: "/" },
  { method: "POST", template: "/fdos" },
  { method: "GET", template: "/fdos" },
  { method: "GET", template: "/fdos/{pid}" },
  { method: "PUT", template: "/fdos/{pid}" },
  { method: "DELETE", template: "/fdos/{pid}" },
  { method: "GET", template: "/fdos/{pid}/metadata" },
  { method: "GET", template: "/fdos/{pid}/operations" },
  { method: "GET", template: "/metadata/{pid}" },
  { method: "GET", template: "/metadata/{pid}/citations" },
  { method: "GET", template: "/metadata/{pid}/cited-by" },
  { method: "GET", template: "/metadata/{pid}/closure" },
  { method: "GET", template: "/operations" },
  { method: "POST", template: "/operations" },
  { method: "POST", template: "/validate" },
  { method: "GET", template: "/pids/{pid}" },
  { method: "GET", template: "/schema/{class}" },
];

function matchesTemplate(template: string, path: string): boolean {
  const wanted = template.split("/").filter((part) => part.length > 0);
  const given = path.split("/").filter((part) => part.length > 0);
  let at = 0;
  for (const part of wanted) {
    if (part === "{pid}") {
      const prefix = given[at];
      const suffix = given[at + 1];
      if (prefix === undefined || suffix === undefined) return false;
      if (!PID_SEGMENT.test(prefix) || !PID_SEGMENT.test(suffix)) return false;
      at += 2;
    } else if (part === "{class}") {
      if (given[at] === undefined) return false;
      at += 1;
    } else {
      if (given[at] !== part) return false;
      at += 1;
    }
  }
  return at === given.length;
}

/** True when method + path (query string ignored) hit a documented endpoint. */
export function isDocumentedRequest(method: string, path: string): boolean {
  const clean = path.split("?", 1)[0] ?? path;
  return DOCUMENTED_ROUTES.some(
    (route) => route.method === method && matchesTemplate(route.template, clean),
  );
}

/** Fill an operation descriptor's path template with a concrete PID. */
export function substitutePidTemplate(template: string, pid: string): string {
  return template.replace("{pid}", pid);
}

export interface RequestLogEntry {
  method: string;
  path: string;
  status: number;
}

/** Append-only record of every request a client issued. */
export class RequestLog {
  private readonly items: RequestLogEntry[] = [];

  record(entry: RequestLogEntry): void {
    this.items.push(entry);
  }

  entries(): readonly RequestLogEntry[] {
    return this.items;
  }

  /** Entries that hit anything outside the documented surface. */
  undocumented(): RequestLogEntry[] {
    return this.items.filter((entry) => !isDocumentedRequest(entry.method, entry.path));
  }
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown;

  constructor(doc: ApiErrorDoc) {
    super(doc.message);
    this.name = "ApiError";
    this.status = doc.status;
    this.code = doc.code;
    this.details = doc.details;
  }
}

/** One raw request/response pair, as shown by the operation console. */
export interface RawExchange {
  status: number;
  body: unknown;
}

function query(params: Record<string, string | number | boolean | undefined>): string {
  const search = new URLSearchParams();
  for (const [name, value] of Object.entries(params)) {
    if (value !== undefined) search.set(name, String(value));
  }
  const encoded = search.toString();
  return encoded ? `?${encoded}` : "";
}

export interface VersionedFdo {
  record: FdoDoc;
  etag: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly log?: RequestLog,
  ) {}

  /** Issue a request, log it, and return the undecoded exchange. */
  async raw(
    method: HttpMethod,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<RawExchange & { headers: Headers }> {
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json", ...headers };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    this.log?.record({ method, path, status: response.status });
    const text = await response.text();
    return {
      status: response.status,
      body: text ? (JSON.parse(text) as unknown) : null,
      headers: response.headers,
    };
  }

  private async request<T>(
    method: HttpMethod,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<{ data: T; headers: Headers }> {
    const exchange = await this.raw(method, path, body, headers);
    if (exchange.status < 200 || exchange.status >= 300) {
      throw new ApiError(exchange.body as ApiErrorDoc);
    }
    return { data: exchange.body as T, headers: exchange.headers };
  }

  private versioned(got: { data: FdoDoc; headers: Headers }): VersionedFdo {
    const etag = got.headers.get("ETag") ?? `"${got.data.version}"`;
    return { record: got.data, etag };
  }

  async serviceInfo(): Promise<ServiceInfo> {
    return (await this.request<ServiceInfo>("GET", "/")).data;
  }

  // -- FDO registry ----------------------------------------------------

  async createFdo(body: CreateFdoBody): Promise<VersionedFdo> {
    return this.versioned(await this.request<FdoDoc>("POST", "/fdos", body));
  }

  async listFdos(
    options: {
      classFilter?: MetadataClass;
      includeTombstoned?: boolean;
      offset?: number;
      limit?: number;
    } = {},
  ): Promise<CatalogPage> {
    const path = `/fdos${query({
      class: options.classFilter,
      include_tombstoned: options.includeTombstoned,
      offset: options.offset,
      limit: options.limit,
    })}`;
    return (await this.request<CatalogPage>("GET", path)).data;
  }

  async getFdo(pid: string): Promise<VersionedFdo> {
    return this.versioned(await this.request<FdoDoc>("GET", `/fdos/${pid}`));
  }

  async updateFdo(pid: string, ifMatch: string, body: UpdateFdoBody): Promise<VersionedFdo> {
    const got = await this.request<FdoDoc>("PUT", `/fdos/${pid}`, body, { "If-Match": ifMatch });
    return this.versioned(got);
  }

  async deleteFdo(pid: string, reason?: string): Promise<TombstoneDoc> {
    const path = `/fdos/${pid}${query({ reason })}`;
    return (await this.request<TombstoneDoc>("DELETE", path)).data;
  }

  async fdoMetadata(pid: string): Promise<MetadataDoc> {
    return (await this.request<MetadataDoc>("GET", `/fdos/${pid}/metadata`)).data;
  }

  async operationsFor(pid: string): Promise<OperationDoc[]> {
    return (await this.request<OperationDoc[]>("GET", `/fdos/${pid}/operations`)).data;
  }

  // -- Metadata registry and relations ----------------------------------

  async metadata(metadataPid: string): Promise<MetadataDoc> {
    return (await this.request<MetadataDoc>("GET", `/metadata/${metadataPid}`)).data;
  }

  async citations(metadataPid: string): Promise<EdgeDoc[]> {
    return (await this.request<EdgeDoc[]>("GET", `/metadata/${metadataPid}/citations`)).data;
  }

  async citedBy(metadataPid: string): Promise<EdgeDoc[]> {
    return (await this.request<EdgeDoc[]>("GET", `/metadata/${metadataPid}/cited-by`)).data;
  }

  async closure(
    metadataPid: string,
    options: { direction?: "outbound" | "inbound"; maxDepth?: number } = {},
  ): Promise<ClosureHitDoc[]> {
    const path = `/metadata/${metadataPid}/closure${query({
      direction: options.direction,
      max_depth: options.maxDepth,
    })}`;
    return (await this.request<ClosureHitDoc[]>("GET", path)).data;
  }

  // -- Operation registry ------------------------------------------------

  async operations(): Promise<OperationDoc[]> {
    return (await this.request<OperationDoc[]>("GET", "/operations")).data;
  }

  async registerOperation(descriptor: {
    op_id: string;
    name: string;
    http_method: string;
    path_template: string;
    applicable_classes: string[];
    description?: string;
  }): Promise<OperationDoc> {
    return (await this.request<OperationDoc>("POST", "/operations", descriptor)).data;
  }

  // -- Validation, resolution, schemas ------------------------------------

  async validate(
    className: string,
    properties: Record<string, unknown>,
  ): Promise<ValidationReportDoc> {
    const body = { class: className, properties };
    return (await this.request<ValidationReportDoc>("POST", "/validate", body)).data;
  }

  async resolvePid(pid: string): Promise<PidResolution> {
    return (await this.request<PidResolution>("GET", `/pids/${pid}`)).data;
  }

  async schema(className: string): Promise<SchemaDoc> {
    return (await this.request<SchemaDoc>("GET", `/schema/${className}`)).data;
  }
}
