import { describe, expect, it } from 'vitest';

import { rasterEquals, rasterizeStrokes } from '../src/raster.js';
import { CanvasState, type Stroke } from '../src/state.js';

function stroke(points: [number, number][], width = 2): Stroke {
  return { points, width };
}

describe('CanvasState undo/redo', () => {
  it('three strokes then three undos leaves a blank canvas', () => {
    const s = new CanvasState();
    s.addStroke(stroke([[1, 1], [5, 5]]));
    s.addStroke(stroke([[2, 8], [9, 8]]));
    s.addStroke(stroke([[0, 0], [0, 9]]));
    expect(s.getStrokes()).toHaveLength(3);
    s.undo();
    s.undo();
    s.undo();
    expect(s.getStrokes()).toHaveLength(0);
    const raster = rasterizeStrokes(s.getStrokes(), 16);
    expect(raster.every((v) => v === 0)).toBe(true);
  });

  it('undo then redo restores the exact stroke list and raster', () => {
    const s = new CanvasState();
    s.addStroke(stroke([[1, 1], [10, 4]]));
    s.addStroke(stroke([[3, 12], [12, 12]], 4));
    const before = rasterizeStrokes(s.getStrokes(), 16);
    const strokesBefore = JSON.stringify(s.getStrokes());
    s.undo();
    s.redo();
    expect(JSON.stringify(s.getStrokes())).toBe(strokesBefore);
    const after = rasterizeStrokes(s.getStrokes(), 16);
    expect(rasterEquals(before, after)).toBe(true);
  });

  it('clear is a single undoable step', () => {
    const s = new CanvasState();
    s.addStroke(stroke([[1, 1], [2, 2]]));
    s.addStroke(stroke([[3, 3], [4, 4]]));
    s.clear();
    expect(s.getStrokes()).toHaveLength(0);
    s.undo();
    expect(s.getStrokes()).toHaveLength(2);
  });

  it('a new stroke clears the redo stack', () => {
    const s = new CanvasState();
    s.addStroke(stroke([[1, 1], [2, 2]]));
    s.undo();
    expect(s.canRedo()).toBe(true);
    s.addStroke(stroke([[5, 5], [6, 6]]));
    expect(s.canRedo()).toBe(false);
  });

  it('undo/redo on empty stacks are no-ops', () => {
    const s = new CanvasState();
    s.undo();
    s.redo();
    expect(s.getStrokes()).toHaveLength(0);
    expect(s.canUndo()).toBe(false);
  });

  it('bulk addStrokes is one undo step', () => {
    const s = new CanvasState();
    s.addStrokes([stroke([[0, 0]]), stroke([[1, 1]]), stroke([[2, 2]])]);
    expect(s.getStrokes()).toHaveLength(3);
    s.undo();
    expect(s.getStrokes()).toHaveLength(0);
  });

  it('stored strokes are defensive copies', () => {
    const s = new CanvasState();
    const mutable = stroke([[1, 1], [2, 2]]);
    s.addStroke(mutable);
    mutable.points[0][0] = 99;
    expect(s.getStrokes()[0].points[0][0]).toBe(1);
  });
});
