/* tslint:disable */
/* eslint-disable */

/**
 * E-norm of `f`, with `space` in the CLI grammar (`lp:2`, `lorentz:3,1`, `orlicz:power:2`, ...).
 */
export function norm(space: string, f: string): string;

/**
 * Decreasing rearrangement as `{"ends": [...], "values": [...]}`.
 */
export function rearrangement(f: string): string;

/**
 * d(v; f) and d(v; Θ_{p,q} f) on `points` log-spaced levels.
 *
 * Pass `q = Infinity` for the one-sided operator. Infinite distribution
 * values come back as `null`.
 */
export function theta_profile(f: string, p: number, q: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly norm: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly rearrangement: (a: number, b: number) => [number, number, number, number];
    readonly theta_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
