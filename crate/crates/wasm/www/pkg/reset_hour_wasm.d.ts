/* tslint:disable */
/* eslint-disable */

/**
 * Observed and regulated hourly prices for one reset hour.
 */
export function constrainedPath(prices: Float64Array, weights: Float64Array, c: number, reset_hour: number): any;

/**
 * Per-hour share envelope across a set of marginal costs.
 */
export function lambdaBand(prices: Float64Array, costs: Float64Array): any;

export function samplePrices(): Float64Array;

export function sampleWeights(): Float64Array;

/**
 * Calibrates shares at marginal cost `c` and ranks all 24 reset hours.
 */
export function sweep(prices: Float64Array, weights: Float64Array, c: number): any;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly constrainedPath: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly lambdaBand: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly samplePrices: () => [number, number];
    readonly sampleWeights: () => [number, number];
    readonly sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
