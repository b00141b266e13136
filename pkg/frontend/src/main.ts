import { ApiClient } from './api';
import { renderSuggestionCard } from './card';
import { DebouncedFetcher } from './debounce';
import { renderFeatureEditor, setEditorValues } from './editor';
import { Session } from './session';
import { markStripStale, renderStrip } from './strip';
import { SchemaResponse, ScoreResponse } from './types';

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('api') ?? 'http://127.0.0.1:8000';
}

function initialVector(schema: SchemaResponse): number[] {
  return schema.features.map((spec) => {
    const p50 = schema.anchors[spec.name].p50;
    return spec.likelihood === 'count' ? Math.max(0, Math.round(p50)) : p50;
  });
}

async function boot(): Promise<void> {
  const client = new ApiClient(apiBase());
  const editorRoot = document.getElementById('editor') as HTMLElement;
  const stripRoot = document.getElementById('strip') as HTMLElement;
  const cardRoot = document.getElementById('card') as HTMLElement;
  const errorPanel = document.getElementById('error-panel') as HTMLElement;

  let schema: SchemaResponse;
  try {
    schema = await client.schema();
  } catch (error) {
    errorPanel.hidden = false;
    errorPanel.textContent = `cannot reach the recourse service: ${error}`;
    return;
  }

  const session = new Session(schema, initialVector(schema), client);

  const rescorer = new DebouncedFetcher<ScoreResponse['scores']>(
    () => session.rescore(),
    (scores) => renderStrip(stripRoot, scores, schema.base_id),
    () => markStripStale(stripRoot),
    150,
  );

  renderFeatureEditor(editorRoot, schema, session.currentX(), {
    onEdit: (feature, value) => {
      session.edit(feature, value);
      rescorer.schedule();
    },
  });

  const methodSelect = document.getElementById('method') as HTMLSelectElement;
  const seedInput = document.getElementById('seed') as HTMLInputElement;
  const targetBoxes = document.getElementById('targets') as HTMLElement;
  // target checkboxes are filled after the first score (peer ids live there)
  void session.rescore().then((scores) => {
    renderStrip(stripRoot, scores, schema.base_id);
    targetBoxes.innerHTML = '';
    for (const peer of scores) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.value = peer.id;
      box.checked = peer.id === schema.base_id;
      box.addEventListener('change', () => {
        const chosen = Array.from(
          targetBoxes.querySelectorAll<HTMLInputElement>('input:checked'),
        ).map((b) => b.value);
        session.selectTargets(chosen.length ? chosen : [schema.base_id]);
      });
      label.append(box, document.createTextNode(peer.id));
      targetBoxes.appendChild(label);
    }
  });

  (document.getElementById('request') as HTMLButtonElement).addEventListener(
    'click',
    async () => {
      const response = await session.requestRecourse(
        methodSelect.value,
        Number(seedInput.value) || 0,
      );
      renderSuggestionCard(cardRoot, methodSelect.value, response, schema,
                           session.currentScores(), {
        onApply: (method) => {
          session.apply(method);
          setEditorValues(editorRoot, schema, session.currentX());
          rescorer.schedule();
        },
      });
    },
  );

  (document.getElementById('undo') as HTMLButtonElement).addEventListener('click', () => {
    session.undo();
    setEditorValues(editorRoot, schema, session.currentX());
    rescorer.schedule();
  });

  (document.getElementById('export') as HTMLButtonElement).addEventListener('click', () => {
    const blob = new Blob([JSON.stringify(session.exportLog(), null, 2)], {
      type: 'application/json',
    });
    const a = document.createElement('a');
    a.href = URL.createObjectURL(blob);
    a.download = 'session.json';
    a.click();
  });
}

void boot();
