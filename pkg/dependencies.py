from store.config import get_settings
from store.dals.spectra_dal import SpectraDAL


def get_spectra_dal() -> SpectraDAL:
    dal = SpectraDAL(get_settings().data_dir)
    dal.ensure_root()
    return dal
