/**
 * Wire types for the FDO manager's JSON API.
 *
 * Every shape here mirrors a documented endpoint request or response body;
 * nothing is invented client-side.
 */

export type MetadataClass = "CreativeWork" | "Organization" | "Person" | "Service";

export const METADATA_CLASSES: readonly MetadataClass[] = [
  "CreativeWork",
  "Organization",
  "Person",
  "Service",
];

export type RecordStatus = "active" | "tombstoned";

/** GET / */
export interface ServiceInfo {
  service: string;
  version: string;
  pid_prefix: string;
}

/**
 * A metadata record as served by GET /metadata/{pid}: a fixed envelope plus
 * one key per schema property (refs are bare PID strings).
 */
export interface MetadataDoc {
  "@context": string;
  "@type": MetadataClass;
  pid: string;
  version: number;
  created: string;
  modified: string;
  status: RecordStatus;
  [property: string]: unknown;
}

/** An FDO record as served by GET /fdos/{pid} (metadata nested in full). */
export interface FdoDoc {
  pid: string;
  do_ref: string;
  do_checksum: string | null;
  metadata_pid: string;
  class: MetadataClass;
  version: number;
  created: string;
  modified: string;
  status: RecordStatus;
  metadata: MetadataDoc;
}

/** GET /fdos */
export interface CatalogPage {
  total: number;
  items: FdoDoc[];
}

/** DELETE /fdos/{pid}, and the `details` of every 410 response. */
export interface TombstoneDoc {
  pid: string;
  deleted_at: string;
  reason: string | null;
  former_class: MetadataClass;
}

/**
 * GET /metadata/{pid}/citations and /cited-by. The cited-by variant adds
 * source_status so callers can tell live citers from tombstoned ones.
 */
export interface EdgeDoc {
  from: string;
  to: string;
  label: string;
  ordinal: number;
  source_status?: RecordStatus | null;
}

/** GET /metadata/{pid}/closure */
export interface ClosureHitDoc {
  pid: string;
  depth: number;
}

/** GET /operations, POST /operations, GET /fdos/{pid}/operations */
export interface OperationDoc {
  op_id: string;
  name: string;
  http_method: "GET" | "POST" | "PUT" | "DELETE";
  path_template: string;
  applicable_classes: MetadataClass[];
  description: string;
}

export interface ViolationDoc {
  path: string;
  code: string;
  message: string;
}

/** POST /validate, and the `details` of every 422 VALIDATION_FAILED. */
export interface ValidationReportDoc {
  ok: boolean;
  violations: ViolationDoc[];
}

export type PropertyShape = "string" | "ref" | "ref_list" | "string_list";

/** One property descriptor inside GET /schema/{class}. */
export interface PropertySpecDoc {
  name: string;
  shape: PropertyShape;
  required: boolean;
  allowed_classes?: MetadataClass[];
  allowed_values?: string[];
  min_items?: number;
}

/** GET /schema/{class} */
export interface SchemaDoc {
  class: MetadataClass;
  properties: PropertySpecDoc[];
}

/** GET /pids/{pid} */
export interface PidResolution {
  kind: "fdo" | "metadata" | "tombstone";
  record: FdoDoc | MetadataDoc | TombstoneDoc;
}

/** Every non-2xx body, uniformly. */
export interface ApiErrorDoc {
  status: number;
  code: string;
  message: string;
  details: unknown;
}

/** POST /fdos request body. */
export interface CreateFdoBody {
  do_ref: string;
  class: MetadataClass;
  properties: Record<string, unknown>;
  do_checksum?: string;
}

/** PUT /fdos/{pid} request body; absent keys are left unchanged. */
export interface UpdateFdoBody {
  do_ref?: string;
  do_checksum?: string | null;
  properties?: Record<string, unknown>;
  class?: MetadataClass;
}
