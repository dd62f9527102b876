/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const boundedness: (a: number, b: number, c: number, d: number) => [number, number];
export const mass_envelope_curve: (a: number, b: number, c: number, d: number) => [number, number];
export const region_rgba: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const scenario_names: () => [number, number];
export const simulation_advance: (a: number, b: number) => number;
export const simulation_event: (a: number) => [number, number];
export const simulation_m0: (a: number) => number;
export const simulation_m_exp: (a: number) => number;
export const simulation_mass: (a: number) => number;
export const simulation_mass_series: (a: number) => [number, number];
export const simulation_max_u: (a: number) => number;
export const simulation_min_u: (a: number) => number;
export const simulation_mu: (a: number) => number;
export const simulation_n: (a: number) => number;
export const simulation_name: (a: number) => [number, number];
export const simulation_new: (a: number, b: number, c: number) => [number, number, number];
export const simulation_norms: (a: number) => [number, number];
export const simulation_steps: (a: number) => number;
export const simulation_t: (a: number) => number;
export const simulation_u_rgba: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
