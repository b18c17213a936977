"""Registry of experiment presets and the folders results are written to"""

import os
import typing as ty
import warnings

import pandas as pd
from immutabledict import immutabledict

import dcopt

export, __all__ = dcopt.exporter()
__all__ += ['log']

log = dcopt.utils.get_logger('dcopt.context')
_naive_tmp = '/tmp/'


class Context:
    """Centralized object for managing:
     - experiment presets (name -> JSON file)
     - output folders
    """

    _directories = None
    _preset_registry = None

    def register_preset(self, name: str, path: str):
        """Register a JSON config under a name"""
        if self._preset_registry is None:
            self._preset_registry = {}
        if not os.path.exists(path):
            raise FileNotFoundError(f'Preset {name} points to missing {path}')
        existing = self._preset_registry.get(name)
        if existing is not None and existing != path:
            log.warning(f'replacing preset {name}: {existing} -> {path}')
        self._preset_registry[name] = path

    def set_paths(self, paths: dict, tolerant=False):
        if self._directories is None:
            self._directories = {}
        for reference, path in paths.items():
            if not os.path.exists(path):
                try:
                    os.makedirs(path)
                except OSError as e:
                    if tolerant:
                        warnings.warn(f'Could not make {path} for {reference}', UserWarning)
                    else:
                        raise FileNotFoundError(f'Could not make {path} for {reference}') from e
        self._directories = {**self._directories, **paths}

    def show_folders(self) -> pd.DataFrame:
        result = {'name': list(self._directories.keys())}
        result['path'] = [self._directories[name] for name in result['name']]
        result['exists'] = [os.path.exists(p) for p in result['path']]
        result['n_files'] = [(len(os.listdir(p)) if os.path.exists(p) else 0)
                             for p in result['path']]
        return pd.DataFrame(result)

    def show_presets(self) -> pd.DataFrame:
        rows = []
        for name in self.presets:
            raw = dcopt.harness.config.load_raw_config(self._preset_registry[name])
            rows.append(dict(name=name,
                             topology=raw.get('topology', {}).get('kind'),
                             m=raw.get('topology', {}).get('m'),
                             problem=raw.get('problem', {}).get('kind'),
                             variant=raw.get('solver', {}).get('variant'),
                             T=raw.get('solver', {}).get('T'),
                             path=self._preset_registry[name]))
        return pd.DataFrame(rows)

    def config_path(self, name_or_path: str) -> str:
        """Path of a registered preset, or the argument itself if it is a file"""
        if os.path.exists(name_or_path):
            return name_or_path
        if name_or_path in (self._preset_registry or {}):
            return self._preset_registry[name_or_path]
        raise FileNotFoundError(
            f'{name_or_path} is neither a file nor one of the presets {self.presets}')

    def get_raw_config(self, name_or_path: str) -> dict:
        return dcopt.harness.config.load_raw_config(self.config_path(name_or_path))

    def get_config(self, name_or_path: str) -> immutabledict:
        return dcopt.harness.config.resolve_config(self.get_raw_config(name_or_path))

    def get_experiment(self, name_or_path: str,
                       verbose: ty.Union[bool, int] = 0) -> 'dcopt.Experiment':
        return dcopt.harness.experiment.Experiment(self.get_config(name_or_path),
                                                   verbose=verbose)

    def output_path(self, filename: str) -> str:
        return os.path.join(self._directories['results_dir'], filename)

    @property
    def presets(self) -> ty.List[str]:
        return sorted((self._preset_registry or {}).keys())

    @property
    def variants(self) -> ty.List[str]:
        return list(dcopt.solver.runner.VARIANTS)


@export
def preset_folder() -> str:
    return os.path.join(dcopt.__path__[0], 'data', 'presets')


@export
def base_context(results_dir: ty.Optional[str] = None) -> Context:
    """Context with the shipped presets and a results folder (cwd by default)"""
    context = Context()
    context.set_paths({
        'preset_dir': preset_folder(),
        'results_dir': results_dir or os.getcwd(),
        'tmp_folder': get_temp(),
    }, tolerant=True)
    for file in sorted(os.listdir(preset_folder())):
        if file.endswith('.json'):
            context.register_preset(file[:-len('.json')], os.path.join(preset_folder(), file))
    return context


def get_temp():
    if 'TMPDIR' in os.environ and os.access(os.environ['TMPDIR'], os.W_OK):
        tmp_folder = os.environ['TMPDIR']
    elif 'TMP' in os.environ and os.access(os.environ['TMP'], os.W_OK):
        tmp_folder = os.environ['TMP']
    elif os.path.exists(_naive_tmp) and os.access(_naive_tmp, os.W_OK):
        tmp_folder = _naive_tmp
    else:
        raise FileNotFoundError('No temp folder available')
    return tmp_folder
