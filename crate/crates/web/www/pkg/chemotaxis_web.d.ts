/* tslint:disable */
/* eslint-disable */

/**
 * A running simulation of one catalog scenario.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Advances up to `steps` steps without passing the scenario horizon;
     * returns false once the run has ended.
     */
    advance(steps: number): boolean;
    /**
     * Terminal event as text, or an empty string while running.
     */
    event(): string;
    m0(): number;
    m_exp(): number;
    mass(): number;
    /**
     * Flattened `(t, M)` pairs recorded so far.
     */
    mass_series(): Float64Array;
    max_u(): number;
    min_u(): number;
    mu(): number;
    n(): number;
    name(): string;
    /**
     * Starts `scenario` (catalog name) on an `n × n` grid.
     */
    constructor(scenario: string, n: number);
    /**
     * Current L¹ and L² norms of u.
     */
    norms(): Float64Array;
    steps(): number;
    t(): number;
    /**
     * The density as RGBA pixels, top row first, on a logarithmic scale.
     */
    u_rgba(): Uint8Array;
}

/**
 * Verdict of the exponent conditions in dimension `n`, as text.
 */
export function boundedness(n: number, k: number, l: number, m: number): string;

/**
 * Samples of the mass bounds on `[0, t_max]`: rows of
 * `t, lower, upper, 1 − envelope, 1 + envelope`, flattened.
 */
export function mass_envelope_curve(m0: number, m_exp: number, t_max: number, samples: number): Float64Array;

/**
 * `res × res` RGBA map of the bounded region in the `(l, m)` plane at fixed
 * `k`, with `l` in `(0, l_max]` left to right and `m` in `[1, m_max]` bottom to top.
 */
export function region_rgba(n: number, k: number, l_max: number, m_max: number, res: number): Uint8Array;

/**
 * Catalog names, newline separated.
 */
export function scenario_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly boundedness: (a: number, b: number, c: number, d: number) => [number, number];
    readonly mass_envelope_curve: (a: number, b: number, c: number, d: number) => [number, number];
    readonly region_rgba: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly scenario_names: () => [number, number];
    readonly simulation_advance: (a: number, b: number) => number;
    readonly simulation_event: (a: number) => [number, number];
    readonly simulation_m0: (a: number) => number;
    readonly simulation_m_exp: (a: number) => number;
    readonly simulation_mass: (a: number) => number;
    readonly simulation_mass_series: (a: number) => [number, number];
    readonly simulation_max_u: (a: number) => number;
    readonly simulation_min_u: (a: number) => number;
    readonly simulation_mu: (a: number) => number;
    readonly simulation_n: (a: number) => number;
    readonly simulation_name: (a: number) => [number, number];
    readonly simulation_new: (a: number, b: number, c: number) => [number, number, number];
    readonly simulation_norms: (a: number) => [number, number];
    readonly simulation_steps: (a: number) => number;
    readonly simulation_t: (a: number) => number;
    readonly simulation_u_rgba: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
