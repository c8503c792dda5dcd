/**
 * The deterministic stub backend.
 *
 * It answers every yes/no question "yes" and every multiple-choice question
 * with its first listed choice (exactly the majority-class baseline), scores
 * any caption by a hash of its bytes, generates template questions, and
 * produces flat constituency parses. No model downloads, fully reproducible.
 */

import { createHash } from 'crypto';

import { PromptRecord, QuestionRecord } from './records';

export const STUB_MODEL = 'stub';

/** Constant answer rule: "yes" for yes/no, else the first choice. */
export function stubAnswer(qtype: string, choices: string[]): string {
  if (qtype === 'yes_no') return 'yes';
  if (!choices.length) throw new Error('question has no choices');
  return choices[0];
}

/** Deterministic similarity in [-1, 1] from the caption bytes. */
export function hashSimilarity(caption: string): number {
  const digest = createHash('sha256').update(caption, 'utf-8').digest('hex');
  const value = parseInt(digest.slice(0, 12), 16) / 0xffffffffffff;
  return Math.round((value * 2 - 1) * 1e6) / 1e6;
}

const STOPWORDS = new Set([
  'a', 'an', 'the', 'is', 'are', 'was', 'were', 'in', 'on', 'at', 'of',
  'with', 'and', 'or', 'to', 'from', 'near', 'over', 'under', 'across',
  'about', 'for', 'by', 'two', 'this', 'that',
]);

function contentWords(text: string): string[] {
  const words = text
    .toLowerCase()
    .split(/\s+/)
    .map((w) => w.replace(/[^a-z0-9-]/g, ''))
    .filter((w) => w.length > 1 && !STOPWORDS.has(w));
  return words.length ? words : ['object'];
}

const DISTRACTORS = ['river', 'mountain', 'window', 'engine'];

/**
 * Template question generation for one prompt. The distribution mirrors the
 * upstream generators' shape: yes/no golds are always "yes" and multiple
 * choice golds are always the first listed choice.
 */
export function questionize(prompt: PromptRecord, metric: 'tifa' | 'vpeval' | 'dsg'): QuestionRecord[] {
  const words = contentWords(prompt.text);
  const out: QuestionRecord[] = [];
  const take = Math.min(words.length, metric === 'vpeval' ? 2 : 3);
  for (let i = 0; i < take; i++) {
    const qid = `${prompt.id}_${metric}_${i}`;
    if (metric !== 'dsg' && i === take - 1 && words.length > 1) {
      const choices = [words[i], ...DISTRACTORS.filter((d) => d !== words[i]).slice(0, 3)];
      out.push({
        question_id: qid,
        prompt_id: prompt.id,
        metric,
        text: `What is shown in the image?`,
        qtype: 'multiple_choice',
        choices,
        gold: choices[0],
      });
      continue;
    }
    const record: QuestionRecord = {
      question_id: qid,
      prompt_id: prompt.id,
      metric,
      text: `Is there a ${words[i]} in the image?`,
      qtype: 'yes_no',
      choices: ['yes', 'no'],
      gold: 'yes',
    };
    if (metric === 'dsg' && i > 0) {
      record.depends_on = [`${prompt.id}_${metric}_${i - 1}`];
    }
    out.push(record);
  }
  return out;
}

function escapeToken(token: string): string {
  return token.replace(/\(/g, '-LRB-').replace(/\)/g, '-RRB-');
}

/** Flat single-level constituency tree over whitespace tokens. */
export function stubParse(text: string): string {
  const tokens = text.split(/\s+/).filter(Boolean).map(escapeToken);
  if (!tokens.length) throw new Error('cannot parse empty text');
  const leaves = tokens.map((t) => `(X ${t})`).join(' ');
  return `(S ${leaves})`;
}
