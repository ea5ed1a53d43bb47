export { lnLogFit, powerLaw, type FitResult } from "./fit.js";
export {
  extractSeries,
  loadReport,
  loadTrialRows,
  parseReport,
  parseTrialRows,
  ReportError,
  SCHEMA_VERSION,
  type Fit,
  type Report,
  type Series,
  type TrialRow,
} from "./report.js";
export { renderFigure, type FigureSpec, type Point } from "./svg.js";
export {
  buildFigure,
  plotRate,
  FIT_AGREEMENT,
  type PlotOptions,
  type PlotResult,
  type PlotSpec,
} from "./plotRate.js";
export { main } from "./cli.js";
