export interface FitResult {
  slope: number;
  intercept: number;
  rSquared: number;
}

/**
 * Ordinary least squares on (ln x, ln y). The intercept is in natural-log
 * space to match the fits stored in report summaries; the slope is the
 * power-law exponent either way.
 */
export function lnLogFit(xs: readonly number[], ys: readonly number[]): FitResult {
  if (xs.length !== ys.length) {
    throw new Error(`got ${xs.length} x values and ${ys.length} y values`);
  }
  if (new Set(xs).size < 2) {
    throw new Error("need at least two distinct x values to fit a slope");
  }
  const lx = xs.map((v) => {
    if (!(v > 0)) throw new Error("x values must be positive");
    return Math.log(v);
  });
  const ly = ys.map((v) => {
    if (!(v > 0)) throw new Error("y values must be positive");
    return Math.log(v);
  });
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = (lx[i] as number) - mx;
    sxx += dx * dx;
    sxy += dx * ((ly[i] as number) - my);
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < n; i++) {
    const resid = (ly[i] as number) - (intercept + slope * (lx[i] as number));
    ssRes += resid * resid;
    const dy = (ly[i] as number) - my;
    ssTot += dy * dy;
  }
  // constant y fits exactly, so the zero-variance case counts as perfect
  const rSquared = ssTot === 0 ? 1 : 1 - ssRes / ssTot;
  return { slope, intercept, rSquared };
}

/** Evaluates the fitted power law C * x^slope with C = exp(intercept). */
export function powerLaw(fit: { slope: number; intercept: number }, x: number): number {
  return Math.exp(fit.intercept + fit.slope * Math.log(x));
}
