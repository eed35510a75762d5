/* tslint:disable */
/* eslint-disable */

export function beam_overlap(na: number): number;

export function irp_slice(na: number, db: number, rel_phase: number, n: number): Float64Array;

/**
 * Flattened `[Φ, perfect, beam, Φ, ...]`.
 */
export function recoil_curve(na: number, db: number, n: number): Float64Array;

export function recoil_ratio(na: number, db: number, rel_phase: number): number;

/**
 * Grid values followed by the two half widths.
 */
export function wigner(xi_sq: number, db: number, rel_phase: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly beam_overlap: (a: number) => [number, number, number];
    readonly irp_slice: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly recoil_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly recoil_ratio: (a: number, b: number, c: number) => [number, number, number];
    readonly wigner: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
