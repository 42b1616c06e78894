/* tslint:disable */
/* eslint-disable */

/**
 * Re-estimate a sweep under class improvements given as
 * `[{"class":"GFS-META","pct":50}, ...]`, returning the per-rate estimated
 * slowest breakdowns plus baseline and improved best points.
 */
export function estimate_sweep(sweep_json: string, epoch: number, improvements_json: string): string;

/**
 * Evaluate the two-class feasibility grid against a goal.
 */
export function feasibility_grid(sweep_json: string, epoch: number, class_a: string, class_b: string, max_percent: number, step: number, goal_s: number): string;

/**
 * Demo preset configurations as JSON.
 */
export function presets(): string;

/**
 * Simulate the configured cache-rate sweep and analyze every cell.
 * Input: a run configuration document. Output: a sweep document holding the
 * slowest-rank summary and all per-rank breakdowns per (rate, epoch).
 */
export function run_sweep(config_json: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly estimate_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly feasibility_grid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly presets: () => [number, number];
    readonly run_sweep: (a: number, b: number) => [number, number, number, number];
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
