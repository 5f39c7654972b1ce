/**
 * Display formatting. Statistics are shown at four significant digits;
 * the headline probability badge uses two decimals. Values the server
 * reports as not estimable render as text, never as NaN.
 */

export const NOT_ESTIMABLE = 'not estimable';

/** Four significant digits with trailing zeros trimmed, e.g. 0.2363, 1.96, 72.81. */
export function sig4(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return 'n/a';
  if (!Number.isFinite(value)) return value > 0 ? 'inf' : '-inf';
  if (value === 0) return '0';
  let text = value.toPrecision(4);
  if (text.includes('e')) {
    // Normalize exponent form the way printf %g does: 1.200e+5 -> 1.2e+5.
    const [mantissa, exponent] = text.split('e');
    const trimmed = mantissa.includes('.') ? mantissa.replace(/0+$/, '').replace(/\.$/, '') : mantissa;
    return `${trimmed}e${exponent}`;
  }
  if (text.includes('.')) {
    text = text.replace(/0+$/, '').replace(/\.$/, '');
  }
  return text;
}

/** Two decimals for the headline badge, e.g. 0.50. */
export function fixed2(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return 'n/a';
  return value.toFixed(2);
}

/** Confidence interval at badge precision, e.g. (0.27, 0.93). */
export function interval2(low: number | null, high: number | null): string {
  if (low === null || high === null) return NOT_ESTIMABLE;
  return `(${fixed2(low)}, ${fixed2(high)})`;
}

/** Confidence interval at statistics precision, e.g. (0.269, 0.9293). */
export function interval4(low: number | null, high: number | null): string {
  if (low === null || high === null) return NOT_ESTIMABLE;
  return `(${sig4(low)}, ${sig4(high)})`;
}

/** Count of additional interviews, where null means no projection exists. */
export function additionalCount(value: number | null | undefined): string {
  if (value === null || value === undefined) return NOT_ESTIMABLE;
  return String(value);
}
