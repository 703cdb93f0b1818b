/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const fusion_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const large_error_run: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
export const table2: () => [number, number, number, number];
export const uniaxial_trial: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
