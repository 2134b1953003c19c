// Request signing for the shared-key MAC scheme. The key is provisioned at
// build/deploy time (same trust model as a shipped app binary): it deters
// bulk scripted junk, it is not a secret from the app's own users.

const encoder = new TextEncoder();

export async function computeMac(
  key: string,
  timestamp: string,
  nonce: string,
  body: string,
): Promise<string> {
  const cryptoKey = await globalThis.crypto.subtle.importKey(
    'raw',
    encoder.encode(key),
    { name: 'HMAC', hash: 'SHA-256' },
    false,
    ['sign'],
  );
  const message = encoder.encode(`${timestamp}\n${nonce}\n${body}`);
  const mac = await globalThis.crypto.subtle.sign('HMAC', cryptoKey, message);
  return Array.from(new Uint8Array(mac))
    .map((b) => b.toString(16).padStart(2, '0'))
    .join('');
}

export function randomNonce(): string {
  const bytes = new Uint8Array(16);
  globalThis.crypto.getRandomValues(bytes);
  return Array.from(bytes)
    .map((b) => b.toString(16).padStart(2, '0'))
    .join('');
}

export async function signHeaders(
  key: string,
  body: string,
  now: number = Date.now() / 1000,
): Promise<Record<string, string>> {
  const timestamp = String(Math.floor(now));
  const nonce = randomNonce();
  return {
    'X-Auth-Timestamp': timestamp,
    'X-Auth-Nonce': nonce,
    'X-Auth-MAC': await computeMac(key, timestamp, nonce, body),
  };
}
