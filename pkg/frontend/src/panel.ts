/** Parameter panel state and its mapping to service request bodies. */

export interface PanelState {
  preset: "setup1" | "setup2";
  waistUm: number;
  shiftMm: number;
  object: "bars" | "uniform" | "slits";
  slitWidthUm: number;
  gridPixels: number;
  gridPitchUm: number;
}

export const DEFAULT_STATE: PanelState = {
  preset: "setup1",
  waistUm: 300,
  shiftMm: 0,
  object: "bars",
  slitWidthUm: 128,
  gridPixels: 256,
  gridPitchUm: 10,
};

export const BOUNDS = {
  waistUm: { min: 50, max: 500 },
  shiftMm: { min: 0, max: 1 },
  slitWidthUm: { min: 1, max: 1000 },
} as const;

export type Field = keyof typeof BOUNDS;

/** Null when in range, otherwise a message mirroring the server schema. */
export function validateField(field: Field, value: number): string | null {
  const { min, max } = BOUNDS[field];
  if (!Number.isFinite(value)) return `${field} must be a number`;
  if (value < min || value > max) {
    return `${field} must be between ${min} and ${max}`;
  }
  return null;
}

export function validateState(state: PanelState): string[] {
  const problems: string[] = [];
  const msgs = [
    validateField("waistUm", state.waistUm),
    validateField("shiftMm", state.shiftMm),
    state.object === "slits" ? validateField("slitWidthUm", state.slitWidthUm) : null,
  ];
  for (const m of msgs) if (m) problems.push(m);
  return problems;
}

export function visibilityRequestBody(state: PanelState): object {
  const overrides: Record<string, unknown> = { pump_waist_um: state.waistUm };
  if (state.shiftMm > 0) {
    overrides.lens_shift_i1_um = [state.shiftMm * 1000, 0];
  }
  const object =
    state.object === "slits"
      ? { kind: "slits", slit_width_um: state.slitWidthUm }
      : { kind: state.object };
  return {
    preset: state.preset,
    overrides,
    object,
    grid: { pixels: state.gridPixels, pitch_um: state.gridPitchUm },
  };
}

export function resolutionRequestBody(
  state: PanelState,
  waistsUm: number[],
  deconvolve: boolean,
): object {
  return { preset: state.preset, waists_um: waistsUm, deconvolve };
}
