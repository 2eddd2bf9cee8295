"""
"halfhop" command line interface

Every run writes its outputs atomically in the output directory, with a
"provenance.json" file recording the tool version, the resolved
configuration and the seeds. Identical configurations give byte-identical
outputs.
"""

import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd

from halfhop.augment import INITS, VARIANTS, HalfHopConfig, half_hop, \
    half_hop_sampled, make_views, split_seed
from halfhop.codec import jsonencode
from halfhop.diffusion import KINDS, attributed_receptive_field, \
    build_operator, receptive_field, sampled_receptive_fields, \
    self_weight_curve
from halfhop.file import file_infos, format_edgelist, format_frame, \
    format_matrix, load_graph
from halfhop.graph import edge_homophily, graph_statistics, homophily_ratio, \
    symmetrize
from halfhop.params import Params, ParamError, choice
from halfhop.regression import ENCODINGS, mse_curve
from halfhop.spectral import spectral_report
from halfhop.synth import PRNG, LatentModel, grid_graph, \
    sample_latent_graph, split_masks
from halfhop.system import atomic_write, outputpath
from halfhop.version import VERSION

log = logging.getLogger(__name__)

COMMANDS = ('ingest', 'gen', 'augment', 'rf', 'diffuse', 'spectra',
            'homophily')

# Exit status on error
ERROR_STATUS = 2


class RunConfig(Params):
    """
    Resolved configuration of a command line run.
    """
    _default = {
        'command': None,
        'out': '.',
        'name': '',
        'seed': 0,
        'threads': None,
        'verbose': False,
        'edges': None,
        'features': None,
        'labels': None,
        'masks': {},
        'skip_header': False,
        'remap': False,
        'dedup': True,
        'symmetrize': False,
        'options': {},
    }
    _dtype = {'command': str, 'out': str, 'name': str, 'seed': int,
              'threads': int, 'verbose': bool, 'masks': dict,
              'skip_header': bool, 'remap': bool, 'dedup': bool,
              'symmetrize': bool, 'options': dict}
    _doc = {
        'command': 'Subcommand: {}.'.format(', '.join(COMMANDS)),
        'out': 'Output directory.',
        'name': 'Output file names prefix.',
        'seed': 'Base seed of all random draws.',
        'threads': 'Maximum number of worker threads.',
        'verbose': 'Debug logging.',
        'edges': 'Edge list file.',
        'features': 'Features CSV file.',
        'labels': 'Labels CSV file.',
        'masks': 'Mask CSV files by mask name.',
        'skip_header': 'CSV files have a header row.',
        'remap': 'Remap external node ids to 0-based ids.',
        'dedup': 'Remove duplicate edges.',
        'symmetrize': 'Add the reverse of every edge.',
        'options': 'Subcommand parameters.',
    }
    _nonewkey = True

    _set_command = staticmethod(choice('command', COMMANDS))

    @staticmethod
    def _set_seed(value):
        if value < 0:
            raise ParamError('seed must be >= 0, got {}'.format(value))
        return value

    @staticmethod
    def _set_threads(value):
        if value < 1:
            raise ParamError('threads must be >= 1, got {}'.format(value))
        return value


def run(config):
    """
    Run a subcommand and write its outputs.

    Parameters
    ----------
    config : RunConfig
        Run configuration.

    Return
    ------
    out : int
        Exit status: 0 on success, 2 on error (one line message on stderr).
    """
    try:
        outputs, extra = _HANDLERS[config['command']](config)
        provenance = _provenance(config, outputs, extra)
        for filename, text in sorted(outputs.items()):
            _write(config, filename, text)
        _write(config, 'provenance.json', jsonencode(provenance))
    except (ValueError, OSError, KeyError) as error:
        message = ' '.join(str(error).split()) or type(error).__name__
        print('halfhop: error: {}'.format(message), file=sys.stderr)
        return ERROR_STATUS
    return 0


def main(argv=None):
    """
    Command line entry point.

    Parameters
    ----------
    argv : list of str, optional
        Arguments. Default to sys.argv[1:].

    Return
    ------
    out : int
        Exit status.
    """
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(name)s: %(levelname)s: %(message)s', stream=sys.stderr)
    logging.captureWarnings(True)

    try:
        config = _config(args)
    except ValueError as error:
        print('halfhop: error: {}'.format(error), file=sys.stderr)
        return ERROR_STATUS
    log.debug('Running %s', config['command'])
    return run(config)


def _parser():
    """Command line parser"""
    parser = argparse.ArgumentParser(
        prog='halfhop',
        description='Half-Hop graph upsampling and diffusion analysis.')
    parser.add_argument('--out', default='.', help='output directory')
    parser.add_argument('--name', default='', help='output file names prefix')
    parser.add_argument('--seed', type=int, default=0, help='base seed')
    parser.add_argument('--threads', type=int, default=None,
                        help='maximum number of worker threads')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging on stderr')

    inputs = argparse.ArgumentParser(add_help=False)
    group = inputs.add_argument_group('graph input')
    group.add_argument('--edges', help="edge list file ('src dst [weight]')")
    group.add_argument('--features', help='features CSV file')
    group.add_argument('--labels', help='labels CSV file')
    group.add_argument('--mask', action='append', default=[], type=_mask,
                       metavar='NAME=PATH', help='mask CSV file (repeatable)')
    group.add_argument('--skip-header', action='store_true',
                       help='CSV files have a header row')
    group.add_argument('--remap', action='store_true',
                       help='remap external node ids')
    group.add_argument('--keep-duplicates', action='store_true',
                       help='keep duplicate edges')
    group.add_argument('--symmetrize', action='store_true',
                       help='add the reverse of every edge')

    model = argparse.ArgumentParser(add_help=False)
    group = model.add_argument_group('latent model')
    group.add_argument('--model', help='latent model JSON file')
    group.add_argument('--epsilon', type=float, help='edge weight offset')
    group.add_argument('--gamma', type=float, help='ridge penalty')
    group.add_argument('--noise', type=float, help='feature noise level')

    commands = parser.add_subparsers(dest='command', required=True)

    commands.add_parser(
        'ingest', parents=[inputs], help='normalize graph files',
        description='Validate graph files and write them in canonical form '
        'with dataset statistics.')

    sub = commands.add_parser(
        'gen', parents=[model], help='generate a synthetic graph',
        description='Generate the 2D grid of the receptive field study or a '
        'latent space random graph of the linear diffusion study.')
    sub.add_argument('--kind', choices=('grid', 'latent'), default='grid')
    sub.add_argument('--rows', type=int, default=15)
    sub.add_argument('--cols', type=int, default=15)
    sub.add_argument('--n', type=int, default=3000)
    sub.add_argument('--train-frac', type=float, default=0.5)

    sub = commands.add_parser(
        'augment', parents=[inputs], help='apply Half-Hop',
        description='Insert slow nodes on all edges or on the incoming '
        'edges of sampled nodes, optionally as two views for contrastive '
        'learning.')
    _add_transform_arguments(sub)
    sub.add_argument('--views', type=float, metavar='P2',
                     help='write two views, the second with probability P2')

    sub = commands.add_parser(
        'rf', parents=[inputs],
        help='receptive fields and self-weights of message passing',
        description='Receptive field and self-weight of a center node '
        'against the number of mean aggregation rounds, with and without '
        'Half-Hop (grid study of slower mixing).')
    sub.add_argument('--center', type=int, help='center node')
    sub.add_argument('--k', type=int, default=10, help='number of rounds')
    sub.add_argument('--alpha', type=float, nargs='+', default=[0.5])
    sub.add_argument('--self-loops', choices=('on', 'off'), default='on')
    sub.add_argument('--grid', type=int, nargs=2, metavar=('R', 'C'),
                     help='use a R x C grid instead of input files')
    sub.add_argument('--p', type=float, help='node sampling probability')
    sub.add_argument('--samples', type=int, default=0,
                     help='number of sampled receptive fields')

    sub = commands.add_parser(
        'diffuse', parents=[inputs, model],
        help='test risk of diffusion and ridge regression against k',
        description='Test MSE of k rounds of linear diffusion followed by '
        'ridge regression, with and without Half-Hop, and the onset of '
        'oversmoothing.')
    sub.add_argument('--k-max', type=int, default=16)
    sub.add_argument('--alpha', type=float, default=0.5)
    sub.add_argument('--variant', choices=VARIANTS, default='hh')
    sub.add_argument('--train-frac', type=float, default=0.5)
    sub.add_argument('--kind', choices=KINDS, default='mean')
    sub.add_argument('--self-loops', choices=('on', 'off'), default='on')
    sub.add_argument('--encoding', choices=ENCODINGS, default='raw')
    sub.add_argument('--intercept', action='store_true')
    sub.add_argument('--latent', type=int, metavar='N',
                     help='use a N nodes latent graph instead of input files')

    sub = commands.add_parser(
        'spectra', parents=[model],
        help='closed form covariance and risk predictions',
        description='Covariance and ridge risk of mean aggregation on '
        'latent space random graphs, small eigenvalue decay rates and '
        'Monte Carlo validation of the directed Half-Hop recursion.')
    sub.add_argument('--k', type=int, default=1,
                     help='number of rounds, odd unless --baseline-only')
    sub.add_argument('--alpha', type=float, default=0.5)
    sub.add_argument('--n', type=int,
                     help='Monte Carlo graph size (no Monte Carlo if unset)')
    sub.add_argument('--trials', type=int, default=20)
    sub.add_argument('--baseline-only', action='store_true',
                     help='baseline predictions only, any number of rounds')

    commands.add_parser(
        'homophily', parents=[inputs], help='node and edge homophily',
        description='Node and edge homophily ratios of a labeled graph '
        '(heterophily benchmark characterization).')
    return parser


def _add_transform_arguments(parser):
    parser.add_argument('--alpha', type=float, default=0.5)
    parser.add_argument('--p', type=float, default=1.0)
    parser.add_argument('--variant', choices=VARIANTS, default='hh')
    parser.add_argument('--init', choices=INITS, default='interpolate')


def _mask(text):
    """Parse a NAME=PATH mask argument"""
    name, sep, path = text.partition('=')
    if not (sep and name and path):
        raise argparse.ArgumentTypeError(
            'expected NAME=PATH, got {!r}'.format(text))
    return name, path


_GLOBALS = ('command', 'out', 'name', 'seed', 'threads', 'verbose')
_INPUTS = ('edges', 'features', 'labels', 'skip_header', 'remap',
           'symmetrize')


def _config(args):
    """RunConfig from parsed arguments"""
    values = vars(args)
    config = RunConfig({key: values[key] for key in _GLOBALS})
    if 'edges' in values:
        for key in _INPUTS:
            config[key] = values[key]
        config['dedup'] = not values['keep_duplicates']
        config['masks'] = dict(values['mask'])
    ignored = set(_GLOBALS + _INPUTS + ('keep_duplicates', 'mask'))
    config['options'] = {key: value for key, value in sorted(values.items())
                         if key not in ignored}
    return config


def _provenance(config, outputs, extra):
    inputs = [file_infos(config[key]) for key in ('edges', 'features',
                                                  'labels')
              if config[key] is not None]
    inputs.extend(file_infos(path) for _, path in sorted(
        config['masks'].items()))
    provenance = {
        'tool': 'halfhop',
        'version': VERSION,
        'prng': PRNG,
        'config': config.asdict(),
        'inputs': inputs,
        'outputs': sorted(outputs),
    }
    provenance.update(extra)
    return provenance


def _write(config, filename, text):
    path = outputpath(config['out'], filename, config['name'])
    atomic_write(path, text)
    log.debug('Wrote %s', path)


def _load(config):
    """Input graph of the configuration"""
    if config['edges'] is None:
        raise ParamError('--edges is required')
    graph, mapping = load_graph(
        config['edges'], features=config['features'],
        labels=config['labels'], masks=config['masks'],
        skip_header=config['skip_header'], remap=config['remap'],
        dedup=config['dedup'])
    if config['symmetrize']:
        graph = symmetrize(graph)
    return graph, mapping


def _graph_files(graph, prefix=''):
    """Output files of a graph"""
    files = {prefix + 'edges.txt': format_edgelist(graph),
             prefix + 'features.csv': format_matrix(graph.features)}
    if graph.labels is not None:
        files[prefix + 'labels.csv'] = format_matrix(graph.labels)
    for name, mask in graph.masks.items():
        files['{}mask_{}.csv'.format(prefix, name)] = format_matrix(
            mask.astype(np.int64))
    return files


def _latent_model(options):
    """Latent model from a JSON file and command line overrides"""
    if options.get('model'):
        with open(options['model'], encoding='utf-8') as handle:
            model = LatentModel(json.load(handle))
    else:
        model = LatentModel()
    for option, key in (('epsilon', 'epsilon'), ('gamma', 'ridge_gamma'),
                        ('noise', 'feature_noise')):
        if options.get(option) is not None:
            model[key] = options[option]
    return model.validate()


def _latent_graph(model, n, train_fraction, seed):
    """Latent graph with train and test masks"""
    graph_seed, mask_seed = split_seed(seed, 2)
    sample = sample_latent_graph(model, n, graph_seed)
    train, test = split_masks(n, train_fraction, mask_seed)
    graph = sample.graph.replace(masks={'train': train, 'test': test})
    return sample, graph, {'graph': graph_seed, 'split': mask_seed}


def _ingest(config):
    graph, mapping = _load(config)
    extra = {'statistics': graph_statistics(graph)}
    if mapping is not None:
        extra['mapping'] = mapping
    return _graph_files(graph), extra


def _gen(config):
    options = config['options']
    if options['kind'] == 'grid':
        graph = grid_graph(options['rows'], options['cols'])
        return _graph_files(graph), {}

    model = _latent_model(options)
    sample, graph, seeds = _latent_graph(
        model, options['n'], options['train_frac'], config['seed'])
    files = _graph_files(graph)
    files['latents.csv'] = format_matrix(sample.latents)
    files['model.json'] = jsonencode(model.asdict())
    return files, {'seeds': seeds}


def _augment(config):
    options = config['options']
    graph, _ = _load(config)
    transform = HalfHopConfig(alpha=options['alpha'], p=options['p'],
                              variant=options['variant'],
                              init=options['init'], seed=config['seed'])
    if options['views'] is None:
        views = {'': half_hop_sampled(graph, transform)}
        seeds = {'view': config['seed']}
    else:
        first, second = split_seed(config['seed'], 2)
        views = dict(zip(('view1_', 'view2_'), make_views(
            graph, transform.copy(seed=first),
            transform.copy(p=options['views'], seed=second))))
        seeds = {'view1': first, 'view2': second}

    files = {}
    for prefix, augmented in views.items():
        files.update(_graph_files(augmented.graph, prefix))
        files[prefix + 'slow_nodes.csv'] = format_frame(pd.DataFrame({
            'slow_id': augmented.slow_ids,
            'source': augmented.provenance[:, 0],
            'target': augmented.provenance[:, 1]}), index=False)
    return files, {'seeds': seeds}


def _rf(config):
    options = config['options']
    if options['grid'] is not None:
        graph = grid_graph(*options['grid'])
    else:
        graph, _ = _load(config)
    self_loops = options['self_loops'] == 'on'
    center = options['center']
    center = graph.num_nodes // 2 if center is None else center
    k = options['k']

    fields = {'baseline': receptive_field(
        build_operator(graph, 'mean', self_loops), center, k)}
    for alpha in options['alpha']:
        augmented = half_hop(graph, HalfHopConfig(alpha=alpha))
        operator = build_operator(augmented.graph, 'mean', self_loops)
        fields['alpha={:g}'.format(alpha)] = attributed_receptive_field(
            augmented, operator, center, k)
    files = {
        'receptive_field.csv': format_frame(pd.DataFrame(
            fields, index=pd.RangeIndex(graph.num_nodes, name='node'))),
        'self_weight.csv': format_frame(self_weight_curve(
            graph, options['alpha'], k, center, self_loops)),
    }

    if options['p'] is not None and options['samples'] > 0:
        frames = []
        for alpha in options['alpha']:
            sampled = sampled_receptive_fields(
                graph, HalfHopConfig(alpha=alpha, p=options['p'],
                                     seed=config['seed']),
                center, k, options['samples'], self_loops)
            frame = pd.DataFrame(sampled)
            frame.insert(0, 'sample', np.arange(options['samples']))
            frame.insert(0, 'alpha', alpha)
            frames.append(frame)
        files['sampled_rf.csv'] = format_frame(
            pd.concat(frames, ignore_index=True), index=False)
    return files, {'center': center}


def _diffuse(config):
    options = config['options']
    seeds = {}
    if options['latent'] is not None:
        model = _latent_model(options)
        _, graph, seeds = _latent_graph(model, options['latent'],
                                        options['train_frac'], config['seed'])
        gamma = model['ridge_gamma'] if options['gamma'] is None else \
            options['gamma']
    else:
        graph, _ = _load(config)
        gamma = 0.1 if options['gamma'] is None else options['gamma']

    curve = mse_curve(
        graph, HalfHopConfig(alpha=options['alpha'],
                             variant=options['variant']),
        kind=options['kind'], self_loops=options['self_loops'] == 'on',
        gamma=gamma, K=options['k_max'], train_fraction=options['train_frac'],
        seed=config['seed'], encoding=options['encoding'],
        intercept=options['intercept'])
    extra = {'curve': curve.config, 'seeds': seeds, 'oversmoothing_onset': {
        arm: curve.oversmoothing_onset(arm) for arm in ('baseline',
                                                        'halfhop')}}
    return {'risk_curve.csv': format_frame(curve.to_frame(), index=False)}, \
        extra


def _spectra(config):
    options = config['options']
    model = _latent_model(options)
    report = spectral_report(model, options['k'], options['alpha'],
                             n=options['n'], trials=options['trials'],
                             seed=config['seed'], threads=config['threads'],
                             halfhop=not options['baseline_only'])
    return {'spectral_report.json': jsonencode(report.asdict()),
            'eigen_table.csv': format_frame(report.eigen_table,
                                            index=False)}, {}


def _homophily(config):
    graph, _ = _load(config)
    report = {'node_homophily': homophily_ratio(graph),
              'edge_homophily': edge_homophily(graph),
              'statistics': graph_statistics(graph)}
    return {'homophily.json': jsonencode(report)}, {}


_HANDLERS = {
    'ingest': _ingest,
    'gen': _gen,
    'augment': _augment,
    'rf': _rf,
    'diffuse': _diffuse,
    'spectra': _spectra,
    'homophily': _homophily,
}
