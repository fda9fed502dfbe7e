import { describe, expect, it } from 'vitest';

import { ServiceClient, ServiceError } from '../src/api.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

describe('ServiceClient', () => {
  it('posts the infer contract and returns the payload', async () => {
    const calls: { url: string; body: unknown }[] = [];
    const client = new ServiceClient('http://svc', async (url, init) => {
      calls.push({ url, body: JSON.parse(String(init?.body)) });
      return jsonResponse({ normal: 'n', stress: 's', mask: 'm', latency_ms: 1.5, warnings: [] });
    });
    const res = await client.infer('SKETCH64', 10, 12);
    expect(res?.stress).toBe('s');
    expect(calls[0].url).toBe('http://svc/api/v1/infer');
    expect(calls[0].body).toEqual({ sketch: 'SKETCH64', force_xy: [10, 12] });
  });

  it('surfaces error details as ServiceError', async () => {
    const client = new ServiceClient('http://svc', async () =>
      jsonResponse({ detail: 'force_xy out of bounds' }, 422),
    );
    await expect(client.infer('S', -1, 0)).rejects.toThrowError(ServiceError);
    await expect(client.infer('S', -1, 0)).rejects.toMatchObject({
      status: 422,
      detail: 'force_xy out of bounds',
    });
  });

  it('drops stale responses when a newer request superseded them', async () => {
    let release: (() => void) | null = null;
    const slowFirst = new Promise<void>((resolve) => {
      release = resolve;
    });
    let call = 0;
    const client = new ServiceClient('http://svc', async () => {
      call += 1;
      if (call === 1) {
        await slowFirst; // first request resolves after the second
        return jsonResponse({ normal: null, stress: 'OLD', mask: 'm', latency_ms: 1, warnings: [] });
      }
      return jsonResponse({ normal: null, stress: 'NEW', mask: 'm', latency_ms: 1, warnings: [] });
    });
    const first = client.infer('S', 1, 1);
    const second = client.infer('S', 2, 2);
    const newRes = await second;
    expect(newRes?.stress).toBe('NEW');
    release!();
    const oldRes = await first;
    expect(oldRes).toBeNull(); // stale, discarded
  });

  it('aggregate passes the region through', async () => {
    const bodies: unknown[] = [];
    const client = new ServiceClient('http://svc', async (_url, init) => {
      bodies.push(JSON.parse(String(init?.body)));
      return jsonResponse({ aggregated: 'a', selected_pixels: [[1, 2]], per_force_count: 1, warnings: [] });
    });
    const res = await client.aggregate('S', { cx: 4, cy: 5, radius: 3.5, max_points: 4 });
    expect(res?.per_force_count).toBe(1);
    expect(bodies[0]).toEqual({
      sketch: 'S',
      region: { cx: 4, cy: 5, radius: 3.5, max_points: 4 },
    });
  });

  it('independent action kinds do not invalidate each other', async () => {
    const client = new ServiceClient('http://svc', async (url) => {
      if (String(url).includes('aggregate')) {
        return jsonResponse({ aggregated: 'a', selected_pixels: [], per_force_count: 0, warnings: [] });
      }
      return jsonResponse({ normal: null, stress: 's', mask: 'm', latency_ms: 1, warnings: [] });
    });
    const [inferRes, aggRes] = await Promise.all([
      client.infer('S', 1, 1),
      client.aggregate('S', { cx: 1, cy: 1, radius: 2 }),
    ]);
    expect(inferRes).not.toBeNull();
    expect(aggRes).not.toBeNull();
  });

  it('health returns parsed checkpoints', async () => {
    const client = new ServiceClient('http://svc', async () =>
      jsonResponse({ status: 'ok', checkpoints: [{ category: 'toy', epoch: 3, resolution: 64 }] }),
    );
    const health = await client.health();
    expect(health.checkpoints[0].resolution).toBe(64);
  });
});
