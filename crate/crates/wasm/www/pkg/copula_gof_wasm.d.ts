/* tslint:disable */
/* eslint-disable */

/**
 * Average copula density on each cell of the `2^j x 2^j` grid, row-major in `(k1, k2)`.
 */
export function density_heatmap(family: string, tau: number, j: number): Float64Array;

/**
 * `n` points as a flat `[u0, v0, u1, v1, ...]` array.
 */
export function sample_points(family: string, tau: number, n: number, seed: number): Float64Array;

/**
 * Draw `n` points from the true copula and test them against `h0_family`; returns the JSON report.
 */
export function simulate_and_test(true_family: string, tau: number, h0_family: string, n: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly density_heatmap: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly sample_points: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly simulate_and_test: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
