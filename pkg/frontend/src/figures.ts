import { join } from 'path';

import { Table, column, readCsv, requireColumns } from './csv';
import { PlotSpec, Scale, Series } from './svg';

const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];

export interface FigureDef {
  /** CSV file consumed, relative to the input directory. */
  file: string;
  /** Columns the CSV must provide. */
  columns: string[];
  description: string;
  build: (table: Table) => PlotSpec;
}

/** Split rows into per-key series using a raw (string) grouping column. */
function groupBy(table: Table, key: string): Map<string, number[]> {
  const groups = new Map<string, number[]>();
  const labels = table.raw.get(key)!;
  labels.forEach((label, i) => {
    if (!groups.has(label)) groups.set(label, []);
    groups.get(label)!.push(i);
  });
  return groups;
}

function pick(values: number[], idx: number[]): number[] {
  return idx.map((i) => values[i]);
}

export const FIGURES: Record<string, FigureDef> = {
  poincare_sweep: {
    file: 'poincare_sweep.csv',
    columns: ['dim', 'domain_id', 's', 't', 'N', 'L', 'constant', 'residual'],
    description: 'Poincare constant against the operator order, one line per domain',
    build: (table) => {
      const t = column(table, 't');
      const s = column(table, 's');
      const c = column(table, 'constant');
      const L = column(table, 'L');
      const series: Series[] = [];
      let k = 0;
      for (const [dom, idx] of groupBy(table, 'domain_id')) {
        // the sweep rows have s = 0; skip anchors and degenerate pairs
        const rows = idx.filter((i) => s[i] === 0 && t[i] > 0);
        const byBox = new Map<number, number[]>();
        for (const i of rows) {
          if (!byBox.has(L[i])) byBox.set(L[i], []);
          byBox.get(L[i])!.push(i);
        }
        for (const [box, boxIdx] of byBox) {
          series.push({
            label: `${dom} (L=${box})`,
            x: pick(t, boxIdx),
            y: pick(c, boxIdx),
            color: PALETTE[k % PALETTE.length],
            dashed: k % 2 === 1,
          });
          k++;
        }
      }
      return {
        title: 'Poincare constants vs order',
        xLabel: 'order t (pair (0, t))',
        yLabel: 'constant',
        xScale: 'linear',
        yScale: 'linear',
        series,
      };
    },
  },

  interpolation_gap: {
    file: 'interpolation.csv',
    columns: ['domain_id', 'z', 'r', 's', 't', 'c_rz', 'c_ts', 'bound', 'gap', 'satisfied'],
    description: 'measured constant against the interpolated bound per parameter tuple',
    build: (table) => {
      const cts = column(table, 'c_ts');
      const bound = column(table, 'bound');
      const idx = cts.map((_, i) => i);
      return {
        title: 'Interpolated bound vs measured constant',
        xLabel: 'tuple index',
        yLabel: 'constant',
        xScale: 'linear',
        yScale: 'linear',
        series: [
          { label: 'measured C(t,s)', x: idx, y: cts, color: PALETTE[0] },
          { label: 'bound C(r,z)^theta', x: idx, y: bound, color: PALETTE[1], dashed: true },
        ],
      };
    },
  },

  cylinder_limit: {
    file: 'cylinder.csv',
    columns: ['elongation', 'constant_2d', 'constant_1d', 'relative_gap'],
    description: 'elongated-box constants approaching the 1-d section value',
    build: (table) => {
      const a = column(table, 'elongation');
      const c2 = column(table, 'constant_2d');
      const c1 = column(table, 'constant_1d');
      return {
        title: 'Elongation ladder vs 1-d section constant',
        xLabel: 'elongation',
        yLabel: 'constant',
        xScale: 'linear',
        yScale: 'linear',
        series: [
          { label: 'box (0,A) x section', x: a, y: c2, color: PALETTE[0] },
          { label: '1-d section', x: a, y: c1, color: PALETTE[1], dashed: true },
        ],
      };
    },
  },

  runge_decay: {
    file: 'runge.csv',
    columns: ['n_sources', 'residual'],
    description: 'approximation residual against the number of exterior sources',
    build: (table) => ({
      title: 'Approximation residual decay',
      xLabel: 'number of sources',
      yLabel: 'relative residual',
      xScale: 'linear',
      yScale: 'log',
      series: [{
        label: 'residual',
        x: column(table, 'n_sources'),
        y: column(table, 'residual'),
        color: PALETTE[0],
      }],
    }),
  },

  reconstruction_profile: {
    file: 'reconstruction.csv',
    columns: ['x', 'gamma_true', 'gamma_rec', 'm_true', 'm_rec', 'q_true', 'q_rec'],
    description: 'true and reconstructed conductivity profiles',
    build: (table) => ({
      title: 'Conductivity reconstruction',
      xLabel: 'x',
      yLabel: 'gamma',
      xScale: 'linear',
      yScale: 'linear',
      series: [
        { label: 'true', x: column(table, 'x'), y: column(table, 'gamma_true'), color: PALETTE[0] },
        { label: 'reconstructed', x: column(table, 'x'), y: column(table, 'gamma_rec'), color: PALETTE[1], dashed: true },
      ],
    }),
  },

  nonuniqueness_profile: {
    file: 'nonuniqueness.csv',
    columns: ['x', 'gamma1', 'gamma2', 'm1', 'm2', 'q1', 'q2'],
    description: 'the equal-data conductivity pair',
    build: (table) => ({
      title: 'Equal-data conductivity pair',
      xLabel: 'x',
      yLabel: 'gamma',
      xScale: 'linear',
      yScale: 'linear',
      series: [
        { label: 'gamma 1', x: column(table, 'x'), y: column(table, 'gamma1'), color: PALETTE[0] },
        { label: 'gamma 2', x: column(table, 'x'), y: column(table, 'gamma2'), color: PALETTE[1], dashed: true },
      ],
    }),
  },
};

export interface FigureSpec {
  inputDir: string;
  figure: string;
  outputPath: string;
  yScale?: Scale;
}

/** Load the figure's CSV, validate its schema, and build the plot. */
export function buildFigure(spec: FigureSpec): PlotSpec {
  const def = FIGURES[spec.figure];
  if (def === undefined) {
    throw new Error(
      `unknown figure '${spec.figure}'; valid names: ${Object.keys(FIGURES).join(', ')}`,
    );
  }
  const path = join(spec.inputDir, def.file);
  const table = readCsv(path);
  requireColumns(table, def.columns, def.file);
  const plot = def.build(table);
  if (spec.yScale !== undefined) {
    plot.yScale = spec.yScale;
  }
  return plot;
}
