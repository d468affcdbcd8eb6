import { writeFileSync } from 'fs';

import { SchemaError } from './csv';
import { FIGURES, FigureSpec, buildFigure } from './figures';
import { Scale, renderSvg } from './svg';

function usage(): string {
  const names = Object.keys(FIGURES).join(', ');
  return [
    'usage: render --in <dir> --fig <name> --out <path> [--yscale linear|log]',
    `figures: ${names}`,
  ].join('\n');
}

function parseArgs(argv: string[]): FigureSpec {
  if (argv[0] !== 'render') {
    throw new Error(usage());
  }
  let inputDir: string | undefined;
  let figure: string | undefined;
  let outputPath: string | undefined;
  let yScale: Scale | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${key}\n${usage()}`);
    }
    switch (key) {
      case '--in':
        inputDir = value;
        break;
      case '--fig':
        figure = value;
        break;
      case '--out':
        outputPath = value;
        break;
      case '--yscale':
        if (value !== 'linear' && value !== 'log') {
          throw new Error(`--yscale must be linear or log, got '${value}'`);
        }
        yScale = value;
        break;
      default:
        throw new Error(`unknown option ${key}\n${usage()}`);
    }
  }
  if (!inputDir || !figure || !outputPath) {
    throw new Error(usage());
  }
  return { inputDir, figure, outputPath, yScale };
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const svg = renderSvg(buildFigure(spec));
    writeFileSync(spec.outputPath, svg);
    console.log(`wrote ${spec.outputPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
