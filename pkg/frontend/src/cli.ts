/**
 * Batch renderer CLI.
 *
 *   render <csv...> [--out-dir DIR] [--formats svg,png]
 *                   [--scale-mode auto|absolute|milli] [--width W] [--height H]
 *
 * One figure per CSV; exit 0 on success, 1 on schema/config errors.
 */

import { DEFAULT_SPEC, Format, RenderError, renderFigure } from "./render";
import { SchemaError } from "./schema";

interface Options {
  files: string[];
  outDir: string;
  formats: Format[];
  scaleMode: "auto" | "absolute" | "milli";
  width: number;
  height: number;
}

const USAGE =
  "usage: render <csv...> [--out-dir DIR] [--formats svg,png] " +
  "[--scale-mode auto|absolute|milli] [--width W] [--height H]";

function parseArgs(argv: string[]): Options {
  if (argv.length === 0 || argv[0] !== "render") {
    throw new RenderError(USAGE);
  }
  const opts: Options = {
    files: [],
    outDir: ".",
    formats: DEFAULT_SPEC.formats.slice(),
    scaleMode: DEFAULT_SPEC.scaleMode,
    width: DEFAULT_SPEC.width,
    height: DEFAULT_SPEC.height,
  };
  const rest = argv.slice(1);
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    const next = () => {
      i += 1;
      if (i >= rest.length) throw new RenderError(`missing value for ${arg}`);
      return rest[i];
    };
    switch (arg) {
      case "--out-dir":
        opts.outDir = next();
        break;
      case "--formats": {
        const toks = next().split(",").map((t) => t.trim());
        for (const t of toks) {
          if (t !== "svg" && t !== "png") throw new RenderError(`unknown format "${t}"`);
        }
        opts.formats = toks as Format[];
        break;
      }
      case "--scale-mode": {
        const mode = next();
        if (mode !== "auto" && mode !== "absolute" && mode !== "milli") {
          throw new RenderError(`unknown scale mode "${mode}"`);
        }
        opts.scaleMode = mode;
        break;
      }
      case "--width":
        opts.width = Number(next());
        break;
      case "--height":
        opts.height = Number(next());
        break;
      default:
        if (arg.startsWith("--")) throw new RenderError(`unknown option ${arg}`);
        opts.files.push(arg);
    }
  }
  if (opts.files.length === 0) throw new RenderError(USAGE);
  if (!Number.isFinite(opts.width) || !Number.isFinite(opts.height)) {
    throw new RenderError("width/height must be numbers");
  }
  return opts;
}

export function main(argv: string[]): number {
  let opts: Options;
  try {
    opts = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  for (const file of opts.files) {
    try {
      const outcome = renderFigure({
        csvPath: file,
        outDir: opts.outDir,
        formats: opts.formats,
        scaleMode: opts.scaleMode,
        width: opts.width,
        height: opts.height,
      });
      console.log(
        `${file}: wrote ${outcome.written.join(", ")} (y scale: ${outcome.scaleMode})`,
      );
    } catch (err) {
      if (err instanceof SchemaError || err instanceof RenderError) {
        console.error(`error: ${file}: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
