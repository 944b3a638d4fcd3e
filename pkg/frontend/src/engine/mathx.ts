/**
 * Portable elementary math kept bit-reproducible across implementations.
 *
 * The relocation pipeline must replay to identical positions in any runtime
 * with IEEE-754 doubles. Library exp() implementations differ in the last
 * ulp between platforms, so the Gaussian kernel uses this fixed-sequence
 * evaluation instead: every step is a single correctly-rounded double
 * operation, which all conforming runtimes agree on bit-for-bit.
 */

const INV_LN2 = 1.4426950408889634074;
const LN2_HI = 6.93147180369123816490e-1;
const LN2_LO = 1.90821492927058770002e-10;

// 1/i! for i = 13 .. 2; Horner order is part of the contract.
const TAYLOR = [
  1.6059043836821613e-10,
  2.08767569878681e-9,
  2.505210838544172e-8,
  2.7557319223985893e-7,
  2.755731922398589e-6,
  2.48015873015873e-5,
  1.984126984126984e-4,
  1.388888888888889e-3,
  8.333333333333333e-3,
  4.1666666666666664e-2,
  1.6666666666666666e-1,
  0.5,
];

/**
 * exp(x) for x <= 0, evaluated with a fixed operation sequence.
 * Values below exp(-708) flush to zero to stay clear of subnormal scaling.
 */
export function expNeg(x: number): number {
  if (x < -708.0) return 0.0;
  const k = Math.floor(x * INV_LN2 + 0.5);
  const r = (x - k * LN2_HI) - k * LN2_LO;
  let acc = TAYLOR[0];
  for (let i = 1; i < TAYLOR.length; i++) {
    acc = acc * r + TAYLOR[i];
  }
  acc = acc * r + 1.0;
  acc = acc * r + 1.0;
  return acc * Math.pow(2, k);
}
