/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_anneal_free: (a: number, b: number) => void;
export const anneal: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const anneal_curve_t: (a: number) => [number, number];
export const anneal_curve_u: (a: number) => [number, number];
export const anneal_fraction_in_well: (a: number) => number;
export const anneal_heatmap: (a: number) => [number, number];
export const anneal_t_bins: (a: number) => number;
export const anneal_x_bins: (a: number) => number;
export const density_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const mass_outside_well: (a: number, b: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
