// Boots a real backend seeded with the 10k fixture for the acceptance test.

import { spawn, type ChildProcess } from 'node:child_process';
import { fileURLToPath } from 'node:url';
import type { TestProject } from 'vitest/node';

const PORT = 8319;

declare module 'vitest' {
  interface ProvidedContext {
    backendUrl: string;
  }
}

export default async function setup(project: TestProject): Promise<() => void> {
  const script = fileURLToPath(new URL('./test/serve_fixture.py', import.meta.url));
  const proc: ChildProcess = spawn('python3', [script, '--port', String(PORT)], {
    stdio: ['ignore', 'inherit', 'inherit'],
  });

  const url = `http://127.0.0.1:${PORT}`;
  const deadline = Date.now() + 90_000;
  let ready = false;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) break;
    try {
      const resp = await fetch(`${url}/health`);
      if (resp.ok) {
        ready = true;
        break;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  if (!ready) {
    proc.kill();
    throw new Error('seeded backend did not come up on ' + url);
  }
  project.provide('backendUrl', url);
  return () => {
    proc.kill('SIGTERM');
  };
}
