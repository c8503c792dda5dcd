/**
 * Job runner: one task per invocation, reading one record file and writing
 * one schema-conformant record file. Only the "stub" model is bundled;
 * plugging a real backend means implementing the same task contract.
 */

import {
  AnswerRecord,
  CaptionRecord,
  LineError,
  PromptRecord,
  QuestionRecord,
  SimilarityRecord,
  TextQaRecord,
  readJsonl,
  writeErrorLog,
  writeJsonlAtomic,
} from './records';
import { STUB_MODEL, hashSimilarity, questionize, stubAnswer, stubParse } from './stub';

export const TASKS = ['similarity', 'vqa', 'text_qa', 'questionize', 'parse'] as const;
export type Task = (typeof TASKS)[number];

export interface BackendJob {
  task: Task;
  input: string;
  model: string;
  output: string;
  batchSize: number;
  /** questionize only: which metric's question set to generate */
  metric?: 'tifa' | 'vpeval' | 'dsg';
}

export interface JobResult {
  written: number;
  errors: LineError[];
  errorLog?: string;
}

function logProgress(task: Task, done: number, total: number, batchSize: number): void {
  if (done === total || done % Math.max(batchSize, 1) === 0) {
    process.stderr.write(`[${task}] ${done}/${total}\n`);
  }
}

export function runJob(job: BackendJob): JobResult {
  if (job.model !== STUB_MODEL) {
    throw new Error(
      `model "${job.model}" is not available locally; only "${STUB_MODEL}" is bundled`,
    );
  }
  const errors: LineError[] = [];
  let outputs: unknown[] = [];

  switch (job.task) {
    case 'vqa': {
      const questions = readJsonl<QuestionRecord>(job.input, (e) => errors.push(e));
      const answers: AnswerRecord[] = [];
      questions.forEach((q, i) => {
        try {
          answers.push({
            question_id: q.question_id,
            source: job.model,
            predicted: stubAnswer(q.qtype, q.choices),
          });
        } catch (err) {
          errors.push({ line: i + 1, error: (err as Error).message });
        }
        logProgress(job.task, i + 1, questions.length, job.batchSize);
      });
      outputs = answers;
      break;
    }
    case 'text_qa': {
      const prompts = readJsonl<TextQaRecord>(job.input, (e) => errors.push(e));
      const answers: AnswerRecord[] = [];
      prompts.forEach((p, i) => {
        if (!p.choices || !p.choices.length) {
          errors.push({ line: i + 1, error: `question ${p.question_id} has no choices` });
        } else {
          answers.push({
            question_id: p.question_id,
            source: job.model,
            predicted: p.choices[0],
          });
        }
        logProgress(job.task, i + 1, prompts.length, job.batchSize);
      });
      outputs = answers;
      break;
    }
    case 'similarity': {
      const rows = readJsonl<Record<string, unknown>>(job.input, (e) => errors.push(e));
      const sims: SimilarityRecord[] = [];
      rows.forEach((row, i) => {
        if (typeof row.caption === 'string') {
          // retrieval caption file from `ablate retrieval_qa`
          const rec = row as unknown as CaptionRecord;
          sims.push({
            prompt_id: rec.prompt_id,
            source: job.model,
            caption_variant: rec.caption_variant,
            score: hashSimilarity(rec.caption),
          });
        } else if (typeof row.text === 'string' && typeof row.id === 'string') {
          // prompts file: emit the full-prompt similarity
          sims.push({
            prompt_id: row.id as string,
            source: job.model,
            caption_variant: 'full_prompt',
            score: hashSimilarity(row.text as string),
          });
        } else {
          errors.push({ line: i + 1, error: 'record has neither a caption nor prompt text' });
        }
        logProgress(job.task, i + 1, rows.length, job.batchSize);
      });
      outputs = sims;
      break;
    }
    case 'questionize': {
      const prompts = readJsonl<PromptRecord>(job.input, (e) => errors.push(e));
      const metric = job.metric ?? 'tifa';
      const questions: QuestionRecord[] = [];
      prompts.forEach((p, i) => {
        try {
          questions.push(...questionize(p, metric));
        } catch (err) {
          errors.push({ line: i + 1, error: (err as Error).message });
        }
        logProgress(job.task, i + 1, prompts.length, job.batchSize);
      });
      outputs = questions;
      break;
    }
    case 'parse': {
      const prompts = readJsonl<PromptRecord>(job.input, (e) => errors.push(e));
      const parsed: PromptRecord[] = [];
      prompts.forEach((p, i) => {
        try {
          parsed.push({ ...p, parse: stubParse(p.text) });
        } catch (err) {
          errors.push({ line: i + 1, error: (err as Error).message });
        }
        logProgress(job.task, i + 1, prompts.length, job.batchSize);
      });
      outputs = parsed;
      break;
    }
    default:
      throw new Error(`unknown task ${job.task}`);
  }

  writeJsonlAtomic(job.output, outputs);
  const result: JobResult = { written: outputs.length, errors };
  if (errors.length) {
    result.errorLog = writeErrorLog(job.output, errors);
  }
  return result;
}
