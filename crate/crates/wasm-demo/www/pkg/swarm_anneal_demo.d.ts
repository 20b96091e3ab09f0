/* tslint:disable */
/* eslint-disable */

/**
 * Result of [`anneal`]: a position heatmap over time and the median best
 * value found.
 */
export class Anneal {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    curve_t(): Float64Array;
    curve_u(): Float64Array;
    /**
     * Share of final particles in `[3, 5]`.
     */
    fraction_in_well(): number;
    /**
     * Row-major `t_bins x x_bins` counts.
     */
    heatmap(): Float64Array;
    t_bins(): number;
    x_bins(): number;
}

export function anneal(method: string, m: number, rate: number, n_particles: number, runs: number, seed: number): Anneal;

export function density_curve(m: number, beta: number, points: number): Float64Array;

export function mass_outside_well(beta: number, m: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_anneal_free: (a: number, b: number) => void;
    readonly anneal: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly anneal_curve_t: (a: number) => [number, number];
    readonly anneal_curve_u: (a: number) => [number, number];
    readonly anneal_fraction_in_well: (a: number) => number;
    readonly anneal_heatmap: (a: number) => [number, number];
    readonly anneal_t_bins: (a: number) => number;
    readonly anneal_x_bins: (a: number) => number;
    readonly density_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly mass_outside_well: (a: number, b: number) => [number, number, number];
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
