/**
 * Contract tests against the primary toolkit's CLI: every file this adapter
 * emits must pass `metric-audit validate` with zero errors, and scoring the
 * stub's constant answers must reproduce the majority baseline exactly.
 */

import assert from 'node:assert/strict';
import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';

import { readJsonl } from '../src/records';

const REPO_ROOT = path.resolve(__dirname, '..', '..', '..');
const FIXTURES = path.join(REPO_ROOT, 'tests', 'fixtures');
const MAIN_JS = path.resolve(__dirname, '..', 'src', 'main.js');

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'adapter-contract-'));
}

function runPrimary(args: string[], cwd: string) {
  const result = spawnSync('python3', ['-m', 'metric_audit', ...args], {
    cwd,
    encoding: 'utf-8',
    env: { ...process.env, PYTHONPATH: path.join(REPO_ROOT, 'src') },
  });
  return result;
}

function runAdapter(args: string[]) {
  return spawnSync('node', [MAIN_JS, ...args], { encoding: 'utf-8' });
}

function writeConfig(dir: string, paths: Record<string, string>, extra: Record<string, unknown> = {}): string {
  const file = path.join(dir, 'config.json');
  fs.writeFileSync(file, JSON.stringify({ paths, seed: 7, trials: 2000, out: path.join(dir, 'out'), ...extra }));
  return file;
}

function expectValid(config: string, dir: string, label: string) {
  const result = runPrimary(['validate', '--config', config], dir);
  assert.equal(result.status, 0, `${label}: validate exited ${result.status}\n${result.stdout}\n${result.stderr}`);
  const summary = JSON.parse(result.stdout);
  assert.equal(summary.ok, true, `${label}: ${JSON.stringify(summary.problems)}`);
}

const fixture = (name: string) => path.join(FIXTURES, name);

test('vqa output validates and equals the bundled stub answers', () => {
  const dir = tmpdir();
  const out = path.join(dir, 'answers.jsonl');
  const run = runAdapter(['vqa', '--input', fixture('questions.jsonl'), '--out', out]);
  assert.equal(run.status, 0, run.stderr);
  const config = writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    questions: fixture('questions.jsonl'),
    answers: out,
  });
  expectValid(config, dir, 'vqa');
  // byte-conformant with the pre-generated stub rows bundled for the primary
  const bundled = readJsonl<Record<string, string>>(fixture('answers.jsonl'))
    .filter((a) => a.source === 'stub');
  const emitted = readJsonl<Record<string, string>>(out);
  assert.deepEqual(
    emitted.map((a) => [a.question_id, a.predicted]),
    bundled.map((a) => [a.question_id, a.predicted]),
  );
});

test('questionize output validates for every metric', () => {
  const dir = tmpdir();
  for (const metric of ['tifa', 'vpeval', 'dsg']) {
    const out = path.join(dir, `questions_${metric}.jsonl`);
    const run = runAdapter([
      'questionize', '--input', fixture('prompts.jsonl'), '--out', out, '--metric', metric,
    ]);
    assert.equal(run.status, 0, run.stderr);
    const config = writeConfig(dir, { prompts: fixture('prompts.jsonl'), questions: out });
    expectValid(config, dir, `questionize/${metric}`);
  }
});

test('parse output validates as a prompts file', () => {
  const dir = tmpdir();
  const out = path.join(dir, 'parsed_prompts.jsonl');
  const plain = path.join(dir, 'plain_prompts.jsonl');
  // strip the bundled parses first so the adapter demonstrably adds its own
  const prompts = readJsonl<Record<string, unknown>>(fixture('prompts.jsonl'))
    .map(({ parse, ...rest }) => rest);
  fs.writeFileSync(plain, prompts.map((p) => JSON.stringify(p)).join('\n') + '\n');
  const run = runAdapter(['parse', '--input', plain, '--out', out]);
  assert.equal(run.status, 0, run.stderr);
  assert.ok(readJsonl<Record<string, unknown>>(out).every((p) => typeof p.parse === 'string'));
  const config = writeConfig(dir, { prompts: out });
  expectValid(config, dir, 'parse');
});

test('similarity outputs validate for captions and full prompts', () => {
  const dir = tmpdir();
  // captions come from the primary's retrieval_qa ablation
  const ablateConfig = writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    questions: fixture('questions.jsonl'),
  });
  const ablate = runPrimary(
    ['ablate', 'retrieval_qa', '--config', ablateConfig, '--out', path.join(dir, 'ab')], dir);
  assert.equal(ablate.status, 0, ablate.stderr);
  const captions = path.join(dir, 'ab', 'ablations', 'retrieval_qa', 'captions.jsonl');

  const capOut = path.join(dir, 'caption_sims.jsonl');
  const capRun = runAdapter(['similarity', '--input', captions, '--out', capOut]);
  assert.equal(capRun.status, 0, capRun.stderr);
  expectValid(writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    similarities: capOut,
  }), dir, 'similarity/captions');

  const fullOut = path.join(dir, 'full_sims.jsonl');
  const fullRun = runAdapter(['similarity', '--input', fixture('prompts.jsonl'), '--out', fullOut]);
  assert.equal(fullRun.status, 0, fullRun.stderr);
  const fullRows = readJsonl<Record<string, unknown>>(fullOut);
  assert.equal(fullRows.length, 12);
  assert.ok(fullRows.every((r) => r.caption_variant === 'full_prompt'));
  expectValid(writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    similarities: fullOut,
  }), dir, 'similarity/full_prompt');
});

test('text_qa output validates against the text-only ablation prompts', () => {
  const dir = tmpdir();
  const ablateConfig = writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    questions: fixture('questions.jsonl'),
  });
  const ablate = runPrimary(
    ['ablate', 'text_only_qa', '--config', ablateConfig, '--out', path.join(dir, 'ab')], dir);
  assert.equal(ablate.status, 0, ablate.stderr);
  const qaPrompts = path.join(dir, 'ab', 'ablations', 'text_only_qa', 'qa_prompts.jsonl');

  const out = path.join(dir, 'text_answers.jsonl');
  const run = runAdapter(['text_qa', '--input', qaPrompts, '--out', out]);
  assert.equal(run.status, 0, run.stderr);
  expectValid(writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    questions: fixture('questions.jsonl'),
    answers: out,
  }), dir, 'text_qa');
});

test('scoring the stub answers reproduces the majority baseline exactly', () => {
  const dir = tmpdir();
  const answers = path.join(dir, 'answers.jsonl');
  const run = runAdapter(['vqa', '--input', fixture('questions.jsonl'), '--out', answers]);
  assert.equal(run.status, 0, run.stderr);
  const config = writeConfig(dir, {
    prompts: fixture('prompts.jsonl'),
    questions: fixture('questions.jsonl'),
    answers,
  });
  const score = runPrimary(['score', '--config', config, '--baselines',
                            '--out', path.join(dir, 'out')], dir);
  assert.equal(score.status, 0, score.stderr);
  const rows = readJsonl<{ prompt_id: string; source: string; metric: string; value: number }>(
    path.join(dir, 'out', 'scores.jsonl'),
  );
  const majority = new Map<string, number>();
  for (const row of rows) {
    if (row.source === 'majority_baseline') majority.set(`${row.prompt_id}|${row.metric}`, row.value);
  }
  const stubRows = rows.filter((r) => r.source === 'stub');
  assert.ok(stubRows.length > 0);
  for (const row of stubRows) {
    assert.equal(row.value, majority.get(`${row.prompt_id}|${row.metric}`),
      `mismatch at ${row.prompt_id}/${row.metric}`);
  }
  console.log(`ACCEPTANCE 9 stub-backend-contract: PASS (${stubRows.length} groups)`);
});
