import assert from 'node:assert/strict';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { test } from 'node:test';

import { SchemaError, column, readCsv, requireColumns } from '../src/csv';

function writeTemp(name: string, body: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'figcsv-'));
  const path = join(dir, name);
  writeFileSync(path, body);
  return path;
}

test('parses numeric columns with header', () => {
  const path = writeTemp('t.csv', 'a,b\n1,2\n3,4.5\n');
  const table = readCsv(path);
  assert.deepEqual(table.header, ['a', 'b']);
  assert.deepEqual(column(table, 'a'), [1, 3]);
  assert.deepEqual(column(table, 'b'), [2, 4.5]);
  assert.equal(table.rowCount, 2);
});

test('keeps raw strings for label columns', () => {
  const path = writeTemp('t.csv', 'id,v\nleft,1\nright,2\n');
  const table = readCsv(path);
  assert.deepEqual(table.raw.get('id'), ['left', 'right']);
});

test('rejects ragged rows', () => {
  const path = writeTemp('t.csv', 'a,b\n1\n');
  assert.throws(() => readCsv(path), SchemaError);
});

test('requireColumns names the missing column', () => {
  const path = writeTemp('t.csv', 'a,b\n1,2\n');
  const table = readCsv(path);
  assert.throws(
    () => requireColumns(table, ['a', 'constant'], 't.csv'),
    (err: Error) => err instanceof SchemaError && err.message.includes("'constant'"),
  );
});

test('round-trips 17-digit cells', () => {
  const value = '0.12345678901234567';
  const path = writeTemp('t.csv', `v\n${value}\n`);
  const table = readCsv(path);
  assert.equal(column(table, 'v')[0], Number(value));
});
