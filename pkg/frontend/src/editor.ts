import { Anchors, FeatureSpec, SchemaResponse } from './types';

export interface EditorCallbacks {
  onEdit: (feature: string, value: number) => void;
}

function sliderStep(spec: FeatureSpec, anchors: Anchors): number {
  if (spec.likelihood === 'count') {
    return 1;
  }
  const span = Math.max(anchors.max - anchors.min, 1e-6);
  return span / 200;
}

/**
 * One control per feature. Immutables render locked; counts step
 * integrally; direction-constrained features are bounded relative to the
 * loaded individual's value; anchor ticks sit at p25/p50/p75.
 */
export function renderFeatureEditor(
  root: HTMLElement,
  schema: SchemaResponse,
  loadedX: number[],
  callbacks: EditorCallbacks,
): void {
  root.innerHTML = '';
  schema.features.forEach((spec, j) => {
    const anchors = schema.anchors[spec.name];
    const row = document.createElement('div');
    row.className = 'feature-row';

    const label = document.createElement('label');
    label.textContent = spec.name;
    label.htmlFor = `feature-${spec.name}`;
    if (!spec.mutable) {
      label.textContent += ' (locked)';
    }

    const input = document.createElement('input');
    input.type = 'range';
    input.id = `feature-${spec.name}`;
    input.dataset.feature = spec.name;
    input.step = String(sliderStep(spec, anchors));
    input.min = String(spec.lower ?? Math.min(anchors.min, loadedX[j]));
    input.max = String(spec.upper ?? Math.max(anchors.max, loadedX[j]));
    if (spec.direction === 'down_only') {
      input.max = String(loadedX[j]);
    } else if (spec.direction === 'up_only') {
      input.min = String(loadedX[j]);
    }
    input.value = String(loadedX[j]);
    input.disabled = !spec.mutable;

    const ticks = document.createElement('datalist');
    ticks.id = `ticks-${spec.name}`;
    for (const p of [anchors.p25, anchors.p50, anchors.p75]) {
      const opt = document.createElement('option');
      opt.value = String(p);
      ticks.appendChild(opt);
    }
    input.setAttribute('list', ticks.id);

    const value = document.createElement('span');
    value.className = 'feature-value';
    value.textContent = String(loadedX[j]);

    input.addEventListener('input', () => {
      let v = Number(input.value);
      if (spec.likelihood === 'count') {
        v = Math.max(0, Math.round(v));
      }
      value.textContent = String(v);
      callbacks.onEdit(spec.name, v);
    });

    row.append(label, input, ticks, value);
    root.appendChild(row);
  });
}

export function setEditorValues(root: HTMLElement, schema: SchemaResponse, x: number[]): void {
  schema.features.forEach((spec, j) => {
    const input = root.querySelector<HTMLInputElement>(`#feature-${CSS.escape(spec.name)}`);
    if (input) {
      input.value = String(x[j]);
      const value = input.parentElement?.querySelector('.feature-value');
      if (value) {
        value.textContent = String(x[j]);
      }
    }
  });
}
