/* tslint:disable */
/* eslint-disable */

/**
 * Mean response of FCFS, Nudge-M and priority with both MTIRs on `points`
 * loads in `[lo, hi]`. A missing window means the optimal one at each load.
 */
export function mean_curve(p: number, ratio: number, scv2: number, m: number | null | undefined, lo: number, hi: number, points: number): string;

/**
 * Waiting and response tails of both types and TIR(t) on `points` times in
 * `[0, t_max]`. A missing window means the optimal one.
 */
export function tail_curve(p: number, ratio: number, lambda: number, scv2: number, m: number | null | undefined, t_max: number, points: number): string;

/**
 * ATIR of Nudge-M for `m = 0..=m_max` together with the optimal window.
 */
export function window_curve(p: number, ratio: number, lambda: number, scv2: number, m_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly mean_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly tail_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly window_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
