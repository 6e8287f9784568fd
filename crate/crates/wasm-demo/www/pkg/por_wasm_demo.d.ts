/* tslint:disable */
/* eslint-disable */
export function thresholdExplorer(scheme: string, q: bigint, n: bigint, k: bigint, d: bigint, ell: number): string;
export function auditExplorer(sampling: string, gamma: bigint, omega: bigint, t: bigint, g: bigint, alpha: number): string;
export function extractionPlayground(scheme: string, q: bigint, n: number, k: number, ell: number, message: string, prover: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
  readonly memory: WebAssembly.Memory;
  readonly auditExplorer: (a: number, b: number, c: bigint, d: bigint, e: bigint, f: bigint, g: number) => [number, number, number, number];
  readonly extractionPlayground: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
  readonly thresholdExplorer: (a: number, b: number, c: bigint, d: bigint, e: bigint, f: bigint, g: number) => [number, number, number, number];
  readonly __wbindgen_export_0: WebAssembly.Table;
  readonly __wbindgen_malloc: (a: number, b: number) => number;
  readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
  readonly __externref_table_dealloc: (a: number) => void;
  readonly __wbindgen_free: (a: number, b: number, c: number) => void;
  readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;
/**
* Instantiates the given `module`, which can either be bytes or
* a precompiled `WebAssembly.Module`.
*
* @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
*
* @returns {InitOutput}
*/
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
* If `module_or_path` is {RequestInfo} or {URL}, makes a request and
* for everything else, calls `WebAssembly.instantiate` directly.
*
* @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
*
* @returns {Promise<InitOutput>}
*/
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
