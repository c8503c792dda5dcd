/**
 * Record-file I/O shared by every adapter task.
 *
 * Files are UTF-8 JSON lines, matching the metric-audit toolkit's schemas.
 * A first line of the form {"__ablation__": {...}} is a provenance header
 * and is skipped on read. Output files are written atomically (tmp + rename).
 */

import * as fs from 'fs';
import * as path from 'path';

export interface PromptRecord {
  id: string;
  dataset: string;
  text: string;
  parse?: string;
  [key: string]: unknown;
}

export interface QuestionRecord {
  question_id: string;
  prompt_id: string;
  metric: 'tifa' | 'vpeval' | 'dsg';
  text: string;
  qtype: 'yes_no' | 'multiple_choice';
  choices: string[];
  gold: string;
  depends_on?: string[];
  [key: string]: unknown;
}

export interface AnswerRecord {
  question_id: string;
  source: string;
  predicted: string;
}

export interface SimilarityRecord {
  prompt_id: string;
  source: string;
  caption_variant: string;
  score: number;
}

/** Per-caption line emitted by `metric-audit ablate retrieval_qa`. */
export interface CaptionRecord {
  question_id: string;
  prompt_id: string;
  caption_variant: string;
  choice_index: number;
  choice: string;
  caption: string;
  is_gold: boolean;
}

/** Per-question line emitted by `metric-audit ablate text_only_qa`. */
export interface TextQaRecord {
  question_id: string;
  prompt_id: string;
  prompt: string;
  choices: string[];
}

export interface LineError {
  line: number;
  error: string;
}

export function readJsonl<T>(file: string, onError?: (e: LineError) => void): T[] {
  const out: T[] = [];
  const lines = fs.readFileSync(file, 'utf-8').split('\n');
  lines.forEach((line, index) => {
    const trimmed = line.trim();
    if (!trimmed) return;
    let obj: unknown;
    try {
      obj = JSON.parse(trimmed);
    } catch (err) {
      const entry = { line: index + 1, error: `malformed JSON: ${(err as Error).message}` };
      if (onError) onError(entry);
      else throw new Error(`${file}:${entry.line}: ${entry.error}`);
      return;
    }
    if (typeof obj !== 'object' || obj === null) {
      const entry = { line: index + 1, error: 'record is not an object' };
      if (onError) onError(entry);
      else throw new Error(`${file}:${entry.line}: ${entry.error}`);
      return;
    }
    if (index === 0 && Object.prototype.hasOwnProperty.call(obj, '__ablation__')) {
      return; // provenance header
    }
    out.push(obj as T);
  });
  return out;
}

/** Write all records at once: tmp file in the same directory, then rename. */
export function writeJsonlAtomic(file: string, records: unknown[]): void {
  fs.mkdirSync(path.dirname(file), { recursive: true });
  const tmp = `${file}.tmp-${process.pid}`;
  const body = records.map((r) => JSON.stringify(r)).join('\n');
  fs.writeFileSync(tmp, records.length ? body + '\n' : '', 'utf-8');
  fs.renameSync(tmp, file);
}

export function writeErrorLog(file: string, errors: LineError[]): string {
  const logPath = `${file}.errors.jsonl`;
  writeJsonlAtomic(logPath, errors);
  return logPath;
}
