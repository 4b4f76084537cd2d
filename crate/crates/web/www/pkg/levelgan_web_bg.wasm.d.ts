/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_evolver_free: (a: number, b: number) => void;
export const __wbg_levelview_free: (a: number, b: number) => void;
export const evolver_best_path: (a: number) => number;
export const evolver_champion: (a: number, b: number) => number;
export const evolver_generation: (a: number) => number;
export const evolver_history: (a: number) => [number, number];
export const evolver_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const evolver_step: (a: number, b: number) => number;
export const levelview_connectivity: (a: number) => number;
export const levelview_height: (a: number) => number;
export const levelview_novelty: (a: number) => number;
export const levelview_path_length: (a: number) => number;
export const levelview_pixels: (a: number) => [number, number];
export const levelview_segments: (a: number) => number;
export const levelview_width: (a: number) => number;
export const random_level: (a: number, b: number, c: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
