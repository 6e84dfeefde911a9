import { ApiClient } from './api.js';
import { WorkbenchState } from './state.js';
import { WorkbenchView } from './view.js';

const root = document.getElementById('app');
if (root) {
  const state = new WorkbenchState(new ApiClient(''));
  const view = new WorkbenchView(state, root, document);
  view.render();
}
