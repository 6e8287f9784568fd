/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const auditExplorer: (a: number, b: number, c: bigint, d: bigint, e: bigint, f: bigint, g: number) => [number, number, number, number];
export const extractionPlayground: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
export const thresholdExplorer: (a: number, b: number, c: bigint, d: bigint, e: bigint, f: bigint, g: number) => [number, number, number, number];
export const __wbindgen_export_0: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
