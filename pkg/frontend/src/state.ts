// Canvas session state: stroke list with undo/redo stacks, interaction mode,
// force markers, and the last service responses.

export type Point = [number, number];

export interface Stroke {
  points: Point[];
  width: number;
}

export type Mode = 'sketch' | 'force';

export interface ForceMarker {
  x: number;
  y: number;
}

export interface Region {
  cx: number;
  cy: number;
  radius: number;
}

export interface PanelImages {
  stress: string | null; // base64 PNG from the service
  normal: string | null;
  mask: string | null;
}

export class CanvasState {
  mode: Mode = 'sketch';
  markers: ForceMarker[] = [];
  region: Region | null = null;
  panels: PanelImages = { stress: null, normal: null, mask: null };

  private strokes: Stroke[] = [];
  private undoStack: Stroke[][] = [];
  private redoStack: Stroke[][] = [];

  getStrokes(): readonly Stroke[] {
    return this.strokes;
  }

  private snapshot(): void {
    this.undoStack.push(this.strokes.slice());
    this.redoStack = [];
  }

  addStroke(stroke: Stroke): void {
    if (stroke.points.length === 0) return;
    this.snapshot();
    this.strokes = this.strokes.concat([copyStroke(stroke)]);
  }

  /** Add many strokes as a single undoable step (used by sketch import). */
  addStrokes(strokes: Stroke[]): void {
    const kept = strokes.filter((s) => s.points.length > 0);
    if (kept.length === 0) return;
    this.snapshot();
    this.strokes = this.strokes.concat(kept.map(copyStroke));
  }

  clear(): void {
    if (this.strokes.length === 0) return;
    this.snapshot();
    this.strokes = [];
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  undo(): void {
    const prev = this.undoStack.pop();
    if (prev === undefined) return;
    this.redoStack.push(this.strokes);
    this.strokes = prev;
  }

  redo(): void {
    const next = this.redoStack.pop();
    if (next === undefined) return;
    this.undoStack.push(this.strokes);
    this.strokes = next;
  }
}

function copyStroke(s: Stroke): Stroke {
  return { points: s.points.map((p) => [p[0], p[1]] as Point), width: s.width };
}
