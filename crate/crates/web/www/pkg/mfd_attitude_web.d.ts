/* tslint:disable */
/* eslint-disable */

/**
 * Posterior concentration and mean of both fusion rules over `n` angle differences, angles in rad.
 */
export function fusion_curve(kappa_prior: number, kappa_meas: number, n: number): string;

/**
 * Monte-Carlo run of all estimators from the antipodal initial belief.
 * `case` 0, 1, 2 selects the 0.24, 0.04 and anisotropic direction noise.
 */
export function large_error_run(_case: number, runs: number, duration_s: number, seed: bigint): string;

/**
 * Rows of the two-step fusion example.
 */
export function table2(): string;

/**
 * One random single-axis run checked against the exponential bound.
 */
export function uniaxial_trial(alpha1: number, alpha2: number, beta1: number, beta2: number, epsilon: number, steps: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fusion_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly large_error_run: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly table2: () => [number, number, number, number];
    readonly uniaxial_trial: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
