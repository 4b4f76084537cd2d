/* tslint:disable */
/* eslint-disable */

/**
 * An NSGA-II run advanced from the page.
 */
export class Evolver {
    free(): void;
    [Symbol.dispose](): void;
    champion(scale: number): LevelView;
    /**
     * Champion path length per generation, starting at generation 0.
     */
    history(): Int32Array;
    constructor(seed: number, mu: number, lambda: number, multigan: boolean);
    /**
     * Runs `generations` more generations; returns the champion path length.
     */
    step(generations: number): number;
    readonly best_path: number;
    readonly generation: number;
}

/**
 * A rendered level with its playability and novelty scores.
 */
export class LevelView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * RGBA bytes, row-major.
     */
    pixels(): Uint8Array;
    readonly connectivity: number;
    readonly height: number;
    /**
     * Level novelty of the placed screens; NaN for a one-screen level.
     */
    readonly novelty: number;
    /**
     * A* path length to the orb, or -1 when unreachable.
     */
    readonly path_length: number;
    readonly segments: number;
    readonly width: number;
}

/**
 * Builds the level of a uniformly random genome.
 */
export function random_level(seed: number, multigan: boolean, scale: number): LevelView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_evolver_free: (a: number, b: number) => void;
    readonly __wbg_levelview_free: (a: number, b: number) => void;
    readonly evolver_best_path: (a: number) => number;
    readonly evolver_champion: (a: number, b: number) => number;
    readonly evolver_generation: (a: number) => number;
    readonly evolver_history: (a: number) => [number, number];
    readonly evolver_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly evolver_step: (a: number, b: number) => number;
    readonly levelview_connectivity: (a: number) => number;
    readonly levelview_height: (a: number) => number;
    readonly levelview_novelty: (a: number) => number;
    readonly levelview_path_length: (a: number) => number;
    readonly levelview_pixels: (a: number) => [number, number];
    readonly levelview_segments: (a: number) => number;
    readonly levelview_width: (a: number) => number;
    readonly random_level: (a: number, b: number, c: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
