/**
 * Probability formatting with one hard rule: the displayed string must
 * equal the engine's own printed digits. The CLI prints Python float
 * reprs (shortest round-trip decimals, scientific below 1e-4 and at or
 * above 1e16, two-digit exponents); this mirrors that format exactly,
 * so a rendered number is always traceable to a service payload.
 */

export function formatProbability(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return Object.is(x, -0) ? "-0.0" : "0.0";
  const abs = Math.abs(x);
  if (abs < 1e-4 || abs >= 1e16) {
    return normalizeExponent(x.toExponential());
  }
  const plain = String(x);
  // JS prints integral doubles bare; Python keeps the .0
  return plain.includes(".") || plain.includes("e") ? plain : plain + ".0";
}

function normalizeExponent(s: string): string {
  const [mantissa, exponent] = s.split("e") as [string, string];
  const sign = exponent.startsWith("-") ? "-" : "+";
  const digits = exponent.replace(/^[+-]/, "").padStart(2, "0");
  return `${mantissa}e${sign}${digits}`;
}

/** Percentage for bar widths; display-only, never shown as the value. */
export function toPercent(p: number): number {
  return Math.max(0, Math.min(100, p * 100));
}
