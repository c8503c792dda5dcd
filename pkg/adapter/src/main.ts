#!/usr/bin/env node
/**
 * Standalone entry point, one task per invocation:
 *
 *   node dist/src/main.js <task> --input <file> --out <file> [--model stub]
 *                         [--batch-size 64] [--metric tifa|vpeval|dsg]
 *
 * Exits non-zero on model/load failures or when any input line was
 * malformed (a per-item error log is written next to the output file).
 */

import { BackendJob, TASKS, Task, runJob } from './jobs';

function usage(message?: string): never {
  if (message) process.stderr.write(`error: ${message}\n`);
  process.stderr.write(
    `usage: main.js <${TASKS.join('|')}> --input FILE --out FILE ` +
      `[--model stub] [--batch-size N] [--metric tifa|vpeval|dsg]\n`,
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): BackendJob {
  const [task, ...rest] = argv;
  if (!task || !(TASKS as readonly string[]).includes(task)) {
    usage(`unknown or missing task: ${task ?? '(none)'}`);
  }
  const job: Partial<BackendJob> = { task: task as Task, model: 'stub', batchSize: 64 };
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) usage(`flag ${flag} needs a value`);
    switch (flag) {
      case '--input':
        job.input = value;
        break;
      case '--out':
        job.output = value;
        break;
      case '--model':
        job.model = value;
        break;
      case '--batch-size':
        job.batchSize = Number(value);
        break;
      case '--metric':
        if (!['tifa', 'vpeval', 'dsg'].includes(value)) usage(`bad metric ${value}`);
        job.metric = value as BackendJob['metric'];
        break;
      default:
        usage(`unknown flag ${flag}`);
    }
  }
  if (!job.input) usage('--input is required');
  if (!job.output) usage('--out is required');
  if (!Number.isFinite(job.batchSize) || (job.batchSize as number) < 1) {
    usage('--batch-size must be a positive number');
  }
  return job as BackendJob;
}

function main(): number {
  const job = parseArgs(process.argv.slice(2));
  try {
    const result = runJob(job);
    process.stderr.write(`[${job.task}] wrote ${result.written} records to ${job.output}\n`);
    if (result.errors.length) {
      process.stderr.write(
        `[${job.task}] ${result.errors.length} input line(s) failed; see ${result.errorLog}\n`,
      );
      return 1;
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main());
}
